#include "rclt/pde_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rclt/closed_form.hpp"
#include "rclt/error.hpp"

namespace rclt {

double GeneratorSpec::operator()(double z) const {
  if (epsilon == 0.0) return kappa * std::abs(z);
  return kappa * (std::hypot(z, epsilon) - epsilon);
}

std::vector<double> PdeGrid::nodes() const {
  std::vector<double> xs(static_cast<std::size_t>(nx));
  for (int i = 0; i < nx; ++i) xs[static_cast<std::size_t>(i)] = x(i);
  return xs;
}

namespace {

void validate(const PdeGrid& grid) {
  if (grid.nx < 3) fail(ErrorCode::UnstableGrid, "grid needs nx >= 3");
  if (grid.nt < 1) fail(ErrorCode::UnstableGrid, "grid needs nt >= 1");
  if (!(grid.x_min < 0.0 && 0.0 < grid.x_max))
    fail(ErrorCode::UnstableGrid, "grid must satisfy x_min < 0 < x_max");
}

// Factorised (I - r D2) with zero-slope boundaries; constant coefficients.
class ImplicitDiffusion {
 public:
  ImplicitDiffusion(std::size_t n, double r) : r_(r), c_(n), inv_(n) {
    // Row 0: (1+2r) u0 - 2r u1; interior: -r, 1+2r, -r; row n-1: -2r, 1+2r.
    const double diag = 1.0 + 2.0 * r;
    double denom = diag;
    inv_[0] = 1.0 / denom;
    c_[0] = -2.0 * r * inv_[0];
    for (std::size_t i = 1; i < n; ++i) {
      const double sub = (i == n - 1) ? -2.0 * r : -r;
      const double sup = -r;
      denom = diag - sub * c_[i - 1];
      inv_[i] = 1.0 / denom;
      c_[i] = sup * inv_[i];
    }
  }

  void solve(std::vector<double>& rhs) const {
    const std::size_t n = rhs.size();
    rhs[0] *= inv_[0];
    for (std::size_t i = 1; i < n; ++i) {
      const double sub = (i == n - 1) ? -2.0 * r_ : -r_;
      rhs[i] = (rhs[i] - sub * rhs[i - 1]) * inv_[i];
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c_[i] * rhs[i + 1];
  }

 private:
  double r_;
  std::vector<double> c_;
  std::vector<double> inv_;
};

// The step is solved for the increment d = u_new - u:
//   (I - r D2) d = r D2 u + dt g(u_x),
// so constants (D2 u = 0, g(0) = 0) stay fixed bit for bit.
double laplacian(std::span<const double> u, std::size_t i) {
  const std::size_t n = u.size();
  if (i == 0) return 2.0 * (u[1] - u[0]);
  if (i == n - 1) return 2.0 * (u[n - 2] - u[n - 1]);
  return (u[i - 1] - u[i]) + (u[i + 1] - u[i]);
}

// Explicit generator term with centred gradients.
void centred_rhs(std::span<const double> u, const GeneratorSpec& gen, double r, double dt,
                 double dx, std::vector<double>& rhs) {
  const std::size_t n = u.size();
  rhs[0] = r * laplacian(u, 0);  // zero slope at the walls: g(0) = 0
  rhs[n - 1] = r * laplacian(u, n - 1);
  for (std::size_t i = 1; i + 1 < n; ++i)
    rhs[i] = r * laplacian(u, i) + dt * gen((u[i + 1] - u[i - 1]) / (2.0 * dx));
}

// Monotone upwind form for convex g with minimum at zero:
// max(g(min(D-u, 0)), g(max(D+u, 0))).
void upwind_rhs(std::span<const double> u, const GeneratorSpec& gen, double r, double dt,
                double dx, std::vector<double>& rhs) {
  const std::size_t n = u.size();
  rhs[0] = r * laplacian(u, 0);
  rhs[n - 1] = r * laplacian(u, n - 1);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double back = (u[i] - u[i - 1]) / dx;
    const double fwd = (u[i + 1] - u[i]) / dx;
    rhs[i] = r * laplacian(u, i) + dt * std::max(gen(std::min(back, 0.0)), gen(std::max(fwd, 0.0)));
  }
}

void add_increment(std::span<const double> u, std::vector<double>& d) {
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += u[i];
}

}  // namespace

BackwardSolve solve_backward(std::span<const double> terminal, const GeneratorSpec& gen,
                             const PdeGrid& grid, double t_start, double t_end, int steps,
                             const StepObserver& observer) {
  validate(grid);
  if (terminal.size() != static_cast<std::size_t>(grid.nx))
    fail(ErrorCode::BadParameters, "terminal samples do not match the grid");
  if (gen.kappa < 0.0 || gen.epsilon < 0.0)
    fail(ErrorCode::BadParameters, "generator needs kappa >= 0 and eps >= 0");
  if (!(t_start <= t_end)) fail(ErrorCode::BadTime, "t_start must not exceed t_end");
  if (steps < 1) fail(ErrorCode::UnstableGrid, "need at least one time step");

  BackwardSolve out;
  out.u.assign(terminal.begin(), terminal.end());
  if (t_start == t_end) return out;

  const double dt = (t_end - t_start) / steps;
  const double dx = grid.dx();
  // Explicit generator: |g'| <= kappa, so the upwind form is monotone iff
  // kappa dt / dx <= 1.
  if (gen.kappa * dt / dx > 1.0)
    fail(ErrorCode::UnstableGrid, "kappa dt / dx exceeds 1; refine the time grid");

  const double r = 0.5 * dt / (dx * dx);
  const ImplicitDiffusion diffusion(out.u.size(), r);
  std::vector<double> next(out.u.size());
  for (int k = 1; k <= steps; ++k) {
    const auto [lo_it, hi_it] = std::minmax_element(out.u.begin(), out.u.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    centred_rhs(out.u, gen, r, dt, dx, next);
    diffusion.solve(next);
    add_increment(out.u, next);
    // Discrete maximum principle: the solution stays inside the range of
    // the previous layer (constants are fixed points since g(0) = 0).
    const double slack = 1e-12 * std::max(1.0, hi - lo);
    const auto [nlo, nhi] = std::minmax_element(next.begin(), next.end());
    if (*nlo < lo - slack || *nhi > hi + slack) {
      upwind_rhs(out.u, gen, r, dt, dx, next);
      diffusion.solve(next);
      add_increment(out.u, next);
      ++out.upwind_steps;
    }
    out.u.swap(next);
    if (observer) observer(k, t_end - k * dt, out.u);
  }
  return out;
}

double interpolate(const PdeGrid& grid, std::span<const double> u, double x) {
  if (!(x >= grid.x_min && x <= grid.x_max))
    fail(ErrorCode::OutOfDomain, "evaluation point outside the grid");
  const double pos = (x - grid.x_min) / grid.dx();
  const auto i = std::min(static_cast<std::size_t>(pos), u.size() - 2);
  const double w = pos - static_cast<double>(i);
  return (1.0 - w) * u[i] + w * u[i + 1];
}

double solve_g_expectation(const TerminalFunction& phi, const GeneratorSpec& gen,
                           const PdeGrid& grid, double x0) {
  validate(grid);
  if (!(x0 >= grid.x_min && x0 <= grid.x_max))
    fail(ErrorCode::OutOfDomain, "x0 outside the grid");
  const auto xs = grid.nodes();
  const auto terminal = phi.sample(xs);
  const auto solved = solve_backward(terminal, gen, grid, 0.0, 1.0, grid.nt);
  return interpolate(grid, solved.u, x0);
}

std::vector<double> default_eps_sequence() { return {0.2, 0.1, 0.05, 0.025}; }

namespace {

double linear_to_zero(double e1, double v1, double e2, double v2) {
  // line through (e1, v1), (e2, v2) evaluated at eps = 0
  if (e1 == e2) return v2;
  return v2 - e2 * (v1 - v2) / (e1 - e2);
}

}  // namespace

EpsilonSweep epsilon_extrapolate(const TerminalFunction& phi, double kappa, const PdeGrid& grid,
                                 std::span<const double> eps_sequence, double x0) {
  if (eps_sequence.empty()) fail(ErrorCode::BadParameters, "empty eps sequence");
  for (std::size_t i = 0; i < eps_sequence.size(); ++i) {
    if (eps_sequence[i] < 0.0) fail(ErrorCode::BadParameters, "eps must be non-negative");
    if (i > 0 && !(eps_sequence[i] < eps_sequence[i - 1]))
      fail(ErrorCode::BadParameters, "eps sequence must be strictly decreasing");
  }
  EpsilonSweep sweep;
  sweep.eps.assign(eps_sequence.begin(), eps_sequence.end());
  sweep.values.resize(sweep.eps.size());
  const auto count = static_cast<long>(sweep.eps.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    sweep.values[k] = solve_g_expectation(phi, GeneratorSpec{kappa, sweep.eps[k]}, grid, x0);
  }
  const std::size_t last = sweep.eps.size() - 1;
  sweep.extrapolated = last == 0 || sweep.eps[last] == 0.0
                           ? sweep.values[last]
                           : linear_to_zero(sweep.eps[last - 1], sweep.values[last - 1],
                                            sweep.eps[last], sweep.values[last]);
  return sweep;
}

MollifiedLimit mollified_indicator_limit(double kappa, double a, double b,
                                         std::span<const double> bandwidths,
                                         std::span<const double> eps_sequence,
                                         const PdeGrid& grid) {
  if (bandwidths.empty()) fail(ErrorCode::BadParameters, "need at least one bandwidth");
  MollifiedLimit out;
  out.bandwidths.assign(bandwidths.begin(), bandwidths.end());
  out.sweeps.resize(out.bandwidths.size());
  for (std::size_t i = 0; i < out.bandwidths.size(); ++i) {
    const auto phi = TerminalFunction::smoothed_indicator(a, b, out.bandwidths[i]);
    out.sweeps[i] = epsilon_extrapolate(phi, kappa, grid, eps_sequence);
  }
  // Mollification error is even in h: extrapolate linearly in h^2 using
  // the two smallest bandwidths.
  std::vector<std::size_t> order(out.bandwidths.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t l, std::size_t r) { return out.bandwidths[l] < out.bandwidths[r]; });
  if (order.size() == 1) {
    out.extrapolated = out.sweeps[order[0]].extrapolated;
  } else {
    const double h1 = out.bandwidths[order[1]];
    const double h2 = out.bandwidths[order[0]];
    out.extrapolated = linear_to_zero(h1 * h1, out.sweeps[order[1]].extrapolated, h2 * h2,
                                      out.sweeps[order[0]].extrapolated);
  }
  return out;
}

double dpp_check(const TerminalFunction& phi, const GeneratorSpec& gen, const PdeGrid& grid, int n,
                 int m, std::span<const double> probe_points) {
  if (n < 1 || m < 1 || m > n) fail(ErrorCode::BadParameters, "dpp_check needs 1 <= m <= n");
  const auto xs = grid.nodes();
  const auto terminal = phi.sample(xs);
  const double t0 = static_cast<double>(m - 1) / n;
  const double t1 = static_cast<double>(m) / n;

  const auto direct = solve_backward(terminal, gen, grid, t0, 1.0, grid.nt);
  // H_{m,n} on [t1, 1], then one more step of length 1/n.
  const auto inner = solve_backward(terminal, gen, grid, t1, 1.0, grid.nt);
  const auto composed = solve_backward(inner.u, gen, grid, t0, t1, grid.nt);

  double worst = 0.0;
  for (double x : probe_points)
    worst = std::max(worst, std::abs(interpolate(grid, direct.u, x) -
                                     interpolate(grid, composed.u, x)));
  return worst;
}

double monotone_reduction(const TerminalFunction& phi, const AmbiguityInterval& iv) {
  // Direction from sampled first differences.
  constexpr int kSamples = 4001;
  constexpr double kSpan = 40.0;
  bool up = false;
  bool down = false;
  double prev = phi(-0.5 * kSpan);
  const double scale = std::max(1.0, std::abs(phi.upper_bound() - phi.lower_bound()));
  for (int i = 1; i < kSamples; ++i) {
    const double x = -0.5 * kSpan + kSpan * i / (kSamples - 1);
    const double y = phi(x);
    if (y > prev + 1e-14 * scale) up = true;
    if (y < prev - 1e-14 * scale) down = true;
    prev = y;
  }
  if (up && down) fail(ErrorCode::NotMonotone, "terminal function is not monotone");
  if (!up && !down) return phi(0.0);
  const double mu = down ? iv.mu_lower : iv.mu_upper;

  using Kind = TerminalFunction::Kind;
  if (phi.kind() == Kind::left || phi.kind() == Kind::right || phi.kind() == Kind::indicator) {
    const double inside = normal_cdf(mu, phi.b()) - normal_cdf(mu, phi.a());
    return phi.complemented() ? 1.0 - inside : inside;
  }
  const auto integrand = [&](double t) {
    const double z = t - mu;
    return phi(t) * std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  };
  using boost::math::quadrature::gauss_kronrod;
  const double inf = std::numeric_limits<double>::infinity();
  return gauss_kronrod<double, 61>::integrate(integrand, -inf, mu, 15, 1e-13) +
         gauss_kronrod<double, 61>::integrate(integrand, mu, inf, 15, 1e-13);
}

}  // namespace rclt
