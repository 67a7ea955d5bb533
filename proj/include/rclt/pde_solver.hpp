#pragma once

#include <functional>
#include <span>
#include <vector>

#include "rclt/measures.hpp"
#include "rclt/terminal.hpp"

namespace rclt {

/// g_eps(z) = kappa (sqrt(z^2 + eps^2) - eps); eps = 0 gives kappa |z|.
struct GeneratorSpec {
  double kappa = 0.0;
  double epsilon = 0.0;

  double operator()(double z) const;
};

struct PdeGrid {
  double x_min = -10.0;
  double x_max = 10.0;
  int nx = 2001;
  int nt = 2000;  // steps on [0, 1]

  double dx() const { return (x_max - x_min) / (nx - 1); }
  double x(int i) const { return x_min + i * dx(); }
  std::vector<double> nodes() const;
};

/// Called after every backward step with the time reached and the values.
using StepObserver = std::function<void(int step, double t, std::span<const double> u)>;

struct BackwardSolve {
  std::vector<double> u;   // values at t_start
  int upwind_steps = 0;    // steps redone with the monotone upwind gradient
};

/// Marches d_t u + u_xx / 2 + g(u_x) = 0 from u(t_end) = terminal back to
/// t_start: implicit diffusion, explicit generator, zero-slope boundaries.
BackwardSolve solve_backward(std::span<const double> terminal, const GeneratorSpec& gen,
                             const PdeGrid& grid, double t_start, double t_end, int steps,
                             const StepObserver& observer = {});

/// u(0, x0) for terminal phi at t = 1.
double solve_g_expectation(const TerminalFunction& phi, const GeneratorSpec& gen,
                           const PdeGrid& grid, double x0 = 0.0);

/// Linear interpolation of grid values at x.
double interpolate(const PdeGrid& grid, std::span<const double> u, double x);

struct EpsilonSweep {
  std::vector<double> eps;
  std::vector<double> values;
  double extrapolated = 0.0;  // linear in eps through the two smallest eps
};

EpsilonSweep epsilon_extrapolate(const TerminalFunction& phi, double kappa, const PdeGrid& grid,
                                 std::span<const double> eps_sequence, double x0 = 0.0);

/// Default eps sweep {0.2, 0.1, 0.05, 0.025}.
std::vector<double> default_eps_sequence();

struct MollifiedLimit {
  std::vector<double> bandwidths;
  std::vector<EpsilonSweep> sweeps;  // one per bandwidth
  double extrapolated = 0.0;         // Richardson in h^2 over the two smallest h
};

/// Upper limit of I_[a,b] via the PDE: mollify at each h, solve over the eps
/// sweep, extrapolate eps -> 0 and then h -> 0. Solves run in parallel.
MollifiedLimit mollified_indicator_limit(double kappa, double a, double b,
                                         std::span<const double> bandwidths,
                                         std::span<const double> eps_sequence,
                                         const PdeGrid& grid);

/// Max |direct - composed| at the probe points, where direct solves
/// [(m-1)/n, 1] in one march and composed chains [m/n, 1] then
/// [(m-1)/n, m/n], each march using grid.nt steps.
double dpp_check(const TerminalFunction& phi, const GeneratorSpec& gen, const PdeGrid& grid, int n,
                 int m, std::span<const double> probe_points);

/// Limit for globally monotone phi: int phi dPhi_{mu_lower} when phi
/// decreases, int phi dPhi_{mu_upper} when it increases.
double monotone_reduction(const TerminalFunction& phi, const AmbiguityInterval& iv);

}  // namespace rclt
