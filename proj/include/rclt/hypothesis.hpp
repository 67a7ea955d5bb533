#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "rclt/measures.hpp"
#include "rclt/worst_case.hpp"

namespace rclt {

/// Location model X_i = theta + Y_i with error means in [-kappa, kappa].
struct TestSpec {
  double kappa = 0.0;
  double sigma = 1.0;
  double alpha = 0.05;
  double theta0 = 0.0;
  double xi = 0.0;  // alternative offset theta1 - theta0
};

struct AcceptanceInterval {
  double a = 0.0;
  double b = 0.0;
};

/// Limiting upper coverage of [a, b] under drift ambiguity [-kappa, kappa].
double coverage(const TestSpec& spec, double a, double b);

/// (a, b) with coverage(a, b) = 1 - alpha. Symmetric mode solves a = -b;
/// otherwise `a` is held at `a_given` and b is solved.
AcceptanceInterval calibrate_interval(const TestSpec& spec, bool symmetric = true,
                                      double a_given = 0.0);

/// Calibrated intervals for each left endpoint in `as` (asymmetric family).
std::vector<AcceptanceInterval> calibrate_family(const TestSpec& spec, std::span<const double> as);

/// Limiting upper probability of accepting theta0 when the truth is theta0 + xi.
double wrong_acceptance(const TestSpec& spec, double a, double b, double xi);

struct OptimalInterval {
  double a = 0.0;
  double b = 0.0;
  double objective = 0.0;
};

/// min over a <= b of wrong_acceptance subject to coverage >= 1 - alpha,
/// searched along the binding constraint b = b(a).
OptimalInterval optimize_ab(const TestSpec& spec, double xi);

struct PointSet {
  double value;
};
struct ClosedInterval {
  double lo;
  double hi;
};
struct FiniteSet {
  std::vector<double> values;
};
using ThetaSet = std::variant<PointSet, ClosedInterval, FiniteSet>;

enum class Decision { accept, reject };
const char* to_string(Decision d);

/// Accept iff [M_n - b, M_n - a] meets Theta.
Decision test_decision(double statistic, double a, double b, const ThetaSet& theta);

/// M_n for observed data when testing theta0: drift interval
/// [theta0 - kappa, theta0 + kappa], switching centre theta0 + (a + b)/2.
double observed_statistic(std::span<const double> xs, const TestSpec& spec, double a, double b);

struct PowerPoint {
  double xi = 0.0;
  double wrong_acceptance = 0.0;
};
std::vector<PowerPoint> power_curve(const TestSpec& spec, double a, double b,
                                    std::span<const double> xis);

/// Monte Carlo acceptance rate of the point null theta0 when the data are
/// theta_true + Y with Y drawn from `errors` under `policy`. M_n - theta_true
/// is the error-process statistic with centre (a + b)/2 - xi.
McEstimate size_power_simulation(const MeasureSet& errors, const TestSpec& spec, double a,
                                 double b, double theta_true, int n, std::size_t paths,
                                 std::uint64_t seed, const DriftPolicy& policy);

/// The built-in drift policies evaluated by the worst-case policy sweep.
std::vector<DriftPolicy> builtin_policies(Variant variant, const Center& center);

}  // namespace rclt
