#include "rclt/closed_form.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "rclt/error.hpp"

namespace rclt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Standard normal cdf. erfc carries full relative precision in the lower
// tail, so Phi(z) for z << 0 keeps its significant digits.
double std_normal_cdf(double z) {
  if (z == kInf) return 1.0;
  if (z == -kInf) return 0.0;
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double log_std_normal_cdf(double z) {
  if (z == kInf) return 0.0;
  if (z == -kInf) return -kInf;
  if (z > -30.0) return std::log(std_normal_cdf(z));
  // Asymptotic series for the Mills ratio below z = -30, where erfc underflows.
  const double z2 = z * z;
  const double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
  return -0.5 * z2 - std::log(-z) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(series);
}

// exp(log_factor) * Phi(z) without overflow in the product.
double scaled_cdf(double log_factor, double z) {
  const double log_phi = log_std_normal_cdf(z);
  if (log_phi == -kInf) return 0.0;
  return std::exp(log_factor + log_phi);
}

// Upper limit for the centred interval [-kappa, kappa]; kappa >= 0.
IndicatorEvaluation centred_upper(double kappa, double a, double b) {
  IndicatorEvaluation out;
  out.kappa = kappa;
  if (a == -kInf && b == kInf) {
    out.value = 1.0;
    out.branch = Branch::whole_line;
  } else if (a == -kInf) {
    out.value = std_normal_cdf(b + kappa);  // Phi_{-kappa}(b)
    out.branch = Branch::one_sided;
  } else if (b == kInf) {
    out.value = 1.0 - std_normal_cdf(a - kappa);  // 1 - Phi_{kappa}(a)
    out.branch = Branch::one_sided;
  } else if (a + b >= 0.0) {
    // Phi_{-kappa}(-a) - e^{-kappa(b-a)} Phi_{-kappa}(-b)
    out.value = std_normal_cdf(-a + kappa) - scaled_cdf(-kappa * (b - a), -b + kappa);
    out.branch = Branch::right_of_center;
  } else {
    // Phi_{-kappa}(b) - e^{-kappa(b-a)} Phi_{-kappa}(a)
    out.value = std_normal_cdf(b + kappa) - scaled_cdf(-kappa * (b - a), a + kappa);
    out.branch = Branch::left_of_center;
  }
  return out;
}

IndicatorEvaluation centred_lower(double kappa, double a, double b) {
  IndicatorEvaluation out;
  out.kappa = kappa;
  if (a == -kInf && b == kInf) {
    out.value = 1.0;
    out.branch = Branch::whole_line;
  } else if (a == -kInf) {
    out.value = std_normal_cdf(b - kappa);  // Phi_{kappa}(b)
    out.branch = Branch::one_sided;
  } else if (b == kInf) {
    out.value = 1.0 - std_normal_cdf(a + kappa);  // 1 - Phi_{-kappa}(a)
    out.branch = Branch::one_sided;
  } else if (a + b >= 0.0) {
    // Phi_{kappa}(-a) - e^{kappa(b-a)} Phi_{kappa}(-b)
    out.value = std_normal_cdf(-a - kappa) - scaled_cdf(kappa * (b - a), -b - kappa);
    out.branch = Branch::right_of_center;
  } else {
    // Phi_{kappa}(b) - e^{kappa(b-a)} Phi_{kappa}(a)
    out.value = std_normal_cdf(b - kappa) - scaled_cdf(kappa * (b - a), a - kappa);
    out.branch = Branch::left_of_center;
  }
  return out;
}

void check_interval(double a, double b) {
  if (std::isnan(a) || std::isnan(b) || !(a < b))
    fail(ErrorCode::BadInterval, "indicator interval needs a < b");
  if (a == kInf || b == -kInf) fail(ErrorCode::BadInterval, "empty indicator interval");
}

}  // namespace

double normal_cdf(double mu, double x) { return std_normal_cdf(x - mu); }

double log_normal_cdf(double mu, double x) { return log_std_normal_cdf(x - mu); }

const char* to_string(Branch b) {
  switch (b) {
    case Branch::right_of_center: return "a+b>=d";
    case Branch::left_of_center: return "a+b<d";
    case Branch::one_sided: return "one-sided";
    case Branch::whole_line: return "whole-line";
    case Branch::degenerate: return "degenerate";
  }
  return "?";
}

ShiftedInterval shift_reduce(const AmbiguityInterval& iv) {
  return {0.5 * (iv.mu_upper - iv.mu_lower), 0.5 * (iv.mu_upper + iv.mu_lower)};
}

IndicatorEvaluation evaluate_indicator_limit(const AmbiguityInterval& iv, double a, double b,
                                             Side side) {
  check_interval(a, b);
  if (iv.mu_lower > iv.mu_upper) fail(ErrorCode::BadParameters, "mu_lower > mu_upper");
  const auto [kappa, center] = shift_reduce(iv);
  // Infinite endpoints stay infinite under the shift.
  const double sa = a - center;
  const double sb = b - center;
  IndicatorEvaluation out = side == Side::upper ? centred_upper(kappa, sa, sb)
                                                : centred_lower(kappa, sa, sb);
  out.center = center;
  return out;
}

double upper_indicator_limit(const AmbiguityInterval& iv, double a, double b) {
  return evaluate_indicator_limit(iv, a, b, Side::upper).value;
}

double lower_indicator_limit(const AmbiguityInterval& iv, double a, double b) {
  return evaluate_indicator_limit(iv, a, b, Side::lower).value;
}

double one_sided_limit(const AmbiguityInterval& iv, double endpoint, Tail direction, Side side) {
  if (std::isnan(endpoint)) fail(ErrorCode::BadInterval, "endpoint is NaN");
  if (direction == Tail::left_tail) {
    // sup: Phi_{mu_lower}(b); inf: Phi_{mu_upper}(b)
    return normal_cdf(side == Side::upper ? iv.mu_lower : iv.mu_upper, endpoint);
  }
  // sup: 1 - Phi_{mu_upper}(a); inf: 1 - Phi_{mu_lower}(a)
  const double mu = side == Side::upper ? iv.mu_upper : iv.mu_lower;
  return normal_cdf(-mu, -endpoint);
}

double reflected_density(double x, double kappa, double t, double z) {
  if (!(t > 0.0)) fail(ErrorCode::BadTime, "density needs t > 0");
  if (kappa < 0.0) fail(ErrorCode::BadParameters, "kappa must be non-negative");
  const double d = x - z;
  const double exponent = (d * d + 2.0 * kappa * t * (std::abs(z) - std::abs(x)) +
                           kappa * kappa * t * t) /
                          (2.0 * t);
  const double gauss = std::exp(-exponent) / std::sqrt(2.0 * std::numbers::pi * t);
  // int_L^inf (2 pi t)^{-1/2} e^{-u^2/2t} du = Phi(-L / sqrt t)
  const double lower = std::abs(x) + std::abs(z) - kappa * t;
  const double tail = std_normal_cdf(-lower / std::sqrt(t));
  return gauss + kappa * std::exp(-2.0 * kappa * std::abs(z)) * tail;
}

}  // namespace rclt
