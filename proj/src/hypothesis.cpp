#include "rclt/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "rclt/closed_form.hpp"
#include "rclt/error.hpp"
#include "rclt/statistics.hpp"

namespace rclt {

namespace {

AmbiguityInterval centred(const TestSpec& spec) {
  return AmbiguityInterval{-spec.kappa, spec.kappa, spec.sigma};
}

void check(const TestSpec& spec) {
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0))
    fail(ErrorCode::BadParameters, "alpha must lie in (0, 1)");
  if (spec.kappa < 0.0) fail(ErrorCode::BadParameters, "kappa must be non-negative");
  if (!(spec.sigma > 0.0)) fail(ErrorCode::BadParameters, "sigma must be positive");
}

double bracket_width(const TestSpec& spec) { return 20.0 + 10.0 * spec.kappa; }

// Root of f on [lo, hi] (f(lo) < 0 < f(hi)) by bisection.
template <class F>
double bisect_root(F f, double lo, double hi) {
  std::uintmax_t iterations = 200;
  const auto tol = boost::math::tools::eps_tolerance<double>(52);
  const auto [l, h] = boost::math::tools::bisect(f, lo, hi, tol, iterations);
  if (iterations >= 200) fail(ErrorCode::NoConvergence, "bisection did not converge");
  return 0.5 * (l + h);
}

double solve_b(const TestSpec& spec, double a) {
  const double target = 1.0 - spec.alpha;
  const double hi = std::max(a, 0.0) + bracket_width(spec);
  const auto f = [&](double b) { return coverage(spec, a, b) - target; };
  if (f(hi) < 0.0)
    fail(ErrorCode::Infeasible, "coverage 1 - alpha is unattainable with this left endpoint");
  const double lo = a + 1e-300 + std::abs(a) * 1e-15;
  if (f(lo) >= 0.0) return lo;
  return bisect_root(f, lo, hi);
}

}  // namespace

double coverage(const TestSpec& spec, double a, double b) {
  return upper_indicator_limit(centred(spec), a, b);
}

AcceptanceInterval calibrate_interval(const TestSpec& spec, bool symmetric, double a_given) {
  check(spec);
  if (!symmetric) return {a_given, solve_b(spec, a_given)};
  const double target = 1.0 - spec.alpha;
  const auto f = [&](double b) { return coverage(spec, -b, b) - target; };
  const double hi = bracket_width(spec);
  double lo = 1e-12;
  if (f(lo) >= 0.0) return {-lo, lo};
  const double b = bisect_root(f, lo, hi);
  return {-b, b};
}

std::vector<AcceptanceInterval> calibrate_family(const TestSpec& spec,
                                                 std::span<const double> as) {
  check(spec);
  std::vector<AcceptanceInterval> out;
  for (double a : as) out.push_back({a, solve_b(spec, a)});
  return out;
}

double wrong_acceptance(const TestSpec& spec, double a, double b, double xi) {
  return upper_indicator_limit(centred(spec), a - xi, b - xi);
}

OptimalInterval optimize_ab(const TestSpec& spec, double xi) {
  check(spec);
  if (xi == 0.0) {
    // Objective equals the constraint: every calibrated interval is optimal.
    const auto sym = calibrate_interval(spec);
    return {sym.a, sym.b, 1.0 - spec.alpha};
  }
  // Feasible left endpoints: 1 - Phi_kappa(a) > 1 - alpha.
  const boost::math::normal_distribution<double> standard;
  const double a_max = spec.kappa + boost::math::quantile(standard, spec.alpha);
  const double a_lo = a_max - bracket_width(spec);
  const double a_hi = a_max - 1e-9;
  const auto objective = [&](double a) {
    return wrong_acceptance(spec, a, solve_b(spec, a), xi);
  };

  constexpr int kGrid = 800;
  int best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kGrid; ++i) {
    const double a = a_lo + (a_hi - a_lo) * i / kGrid;
    const double v = objective(a);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  const double step = (a_hi - a_lo) / kGrid;
  const double lo = std::max(a_lo, a_lo + (best - 1) * step);
  const double hi = std::min(a_hi, a_lo + (best + 1) * step);
  std::uintmax_t iterations = 500;
  const auto [a_star, value] = boost::math::tools::brent_find_minima(objective, lo, hi, 40, iterations);
  if (iterations >= 500) fail(ErrorCode::NoConvergence, "interval optimisation did not converge");

  OptimalInterval out{a_star, solve_b(spec, a_star), value};
  if (best_value < out.objective) {
    out.a = a_lo + best * step;
    out.b = solve_b(spec, out.a);
    out.objective = best_value;
  }
  if (std::abs(coverage(spec, out.a, out.b) - (1.0 - spec.alpha)) > 1e-9)
    fail(ErrorCode::NoConvergence, "coverage constraint does not bind at the optimum");
  return out;
}

const char* to_string(Decision d) { return d == Decision::accept ? "accept" : "reject"; }

Decision test_decision(double statistic, double a, double b, const ThetaSet& theta) {
  if (!(a < b)) fail(ErrorCode::BadInterval, "acceptance interval needs a < b");
  const double lo = statistic - b;
  const double hi = statistic - a;
  const auto meets = [&](double t) { return lo <= t && t <= hi; };
  const bool accept = std::visit(
      [&](const auto& set) -> bool {
        using T = std::decay_t<decltype(set)>;
        if constexpr (std::is_same_v<T, PointSet>) {
          return meets(set.value);
        } else if constexpr (std::is_same_v<T, ClosedInterval>) {
          if (set.lo > set.hi) fail(ErrorCode::EmptyTheta, "empty parameter interval");
          return set.lo <= hi && lo <= set.hi;
        } else {
          if (set.values.empty()) fail(ErrorCode::EmptyTheta, "empty parameter set");
          return std::any_of(set.values.begin(), set.values.end(), meets);
        }
      },
      theta);
  return accept ? Decision::accept : Decision::reject;
}

double observed_statistic(std::span<const double> xs, const TestSpec& spec, double a, double b) {
  check(spec);
  SwitchRule rule{AmbiguityInterval{spec.theta0 - spec.kappa, spec.theta0 + spec.kappa, spec.sigma},
                  Center::at(spec.theta0 + 0.5 * (a + b))};
  return path_statistic(xs, static_cast<int>(xs.size()), rule, Variant::M);
}

std::vector<PowerPoint> power_curve(const TestSpec& spec, double a, double b,
                                    std::span<const double> xis) {
  std::vector<PowerPoint> out;
  for (double xi : xis) out.push_back({xi, wrong_acceptance(spec, a, b, xi)});
  return out;
}

McEstimate size_power_simulation(const MeasureSet& errors, const TestSpec& spec, double a,
                                 double b, double theta_true, int n, std::size_t paths,
                                 std::uint64_t seed, const DriftPolicy& policy) {
  check(spec);
  validate_measure_set(errors);
  const double xi = theta_true - spec.theta0;
  // accept  <=>  a <= M_n - theta0 <= b  <=>  a - xi <= M_n - theta_true <= b - xi
  const auto phi = TerminalFunction::indicator(a - xi, b - xi);
  const auto spec_y = StatisticSpec::special(Center::at(0.5 * (a + b) - xi));
  return mc_policy_value(errors, policy, phi, spec_y, n, paths, seed);
}

std::vector<DriftPolicy> builtin_policies(Variant variant, const Center& center) {
  return {DriftPolicy::constant(0), DriftPolicy::constant(1),
          DriftPolicy::statistic_threshold(variant, center),
          DriftPolicy::reversed_threshold(variant, center), DriftPolicy::alternating()};
}

}  // namespace rclt
