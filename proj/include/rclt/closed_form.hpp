#pragma once

#include "rclt/measures.hpp"

namespace rclt {

/// P(N(mu, 1) <= x). x may be infinite.
double normal_cdf(double mu, double x);
/// log P(N(mu, 1) <= x), accurate deep in the lower tail.
double log_normal_cdf(double mu, double x);

enum class Side { upper, lower };
enum class Tail { left_tail, right_tail };

/// Which formula produced a two-sided limit.
enum class Branch { right_of_center, left_of_center, one_sided, whole_line, degenerate };
const char* to_string(Branch b);

struct IndicatorEvaluation {
  double value = 0.0;
  Branch branch = Branch::degenerate;
  double kappa = 0.0;
  double center = 0.0;
};

struct ShiftedInterval {
  double kappa = 0.0;   // (mu_upper - mu_lower) / 2
  double center = 0.0;  // (mu_upper + mu_lower) / 2
};

ShiftedInterval shift_reduce(const AmbiguityInterval& iv);

/// Upper (sup) limit E[I_[a,b](B_1)] for drift ambiguity [mu_lower, mu_upper].
/// Infinite endpoints reduce to the one-sided forms.
double upper_indicator_limit(const AmbiguityInterval& iv, double a, double b);
/// Lower (inf) counterpart.
double lower_indicator_limit(const AmbiguityInterval& iv, double a, double b);

/// Same as the two functions above but reports the branch and the shift.
IndicatorEvaluation evaluate_indicator_limit(const AmbiguityInterval& iv, double a, double b,
                                             Side side);

/// Limit of a one-sided indicator: left_tail is I_(-inf, endpoint],
/// right_tail is I_[endpoint, inf).
double one_sided_limit(const AmbiguityInterval& iv, double endpoint, Tail direction, Side side);

/// Time-t transition density at z of x - kappa int sgn(X) ds + B_t started at x.
double reflected_density(double x, double kappa, double t, double z);

}  // namespace rclt
