#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rclt/rational.hpp"

namespace rclt {

/// Bounded terminal function phi. Indicator kinds keep exact endpoints so
/// the lattice engine can decide membership without rounding.
class TerminalFunction {
 public:
  enum class Kind { indicator, left, right, smoothed_indicator, tabulated };

  /// I_[a,b]
  static TerminalFunction indicator(double a, double b);
  static TerminalFunction indicator(const Rational& a, const Rational& b);
  /// I_(-inf, b]
  static TerminalFunction left(double b);
  static TerminalFunction left(const Rational& b);
  /// I_[a, inf)
  static TerminalFunction right(double a);
  static TerminalFunction right(const Rational& a);
  /// Gaussian mollification of I_[a,b] with bandwidth h; a = -inf or
  /// b = +inf give smoothed one-sided indicators.
  static TerminalFunction smoothed_indicator(double a, double b, double h);
  /// Piecewise-linear through (xs, ys), flat outside [xs.front(), xs.back()].
  static TerminalFunction tabulated(std::vector<double> xs, std::vector<double> ys);
  static TerminalFunction constant(double k);

  Kind kind() const { return kind_; }
  bool complemented() const { return complemented_; }
  bool is_indicator_kind() const {
    return kind_ == Kind::indicator || kind_ == Kind::left || kind_ == Kind::right;
  }

  double operator()(double x) const;

  /// Endpoints; -inf / +inf for absent ones.
  double a() const { return a_; }
  double b() const { return b_; }
  double bandwidth() const { return h_; }
  const std::optional<Rational>& exact_a() const { return exact_a_; }
  const std::optional<Rational>& exact_b() const { return exact_b_; }

  /// Symmetry centre when phi is symmetric (indicators: (a+b)/2).
  std::optional<double> center() const { return center_; }
  TerminalFunction& with_center(double c) {
    center_ = c;
    return *this;
  }

  double lower_bound() const;
  double upper_bound() const;

  /// x -> phi(x + t).
  TerminalFunction shifted(double t) const;
  /// x -> 1 - phi(x); used to evaluate lower expectations as 1 - upper.
  TerminalFunction complement() const;

  std::vector<double> sample(std::span<const double> xs) const;

  std::string describe() const;

 private:
  TerminalFunction() = default;

  Kind kind_ = Kind::tabulated;
  double a_ = 0.0;
  double b_ = 0.0;
  double h_ = 0.0;
  std::optional<Rational> exact_a_;
  std::optional<Rational> exact_b_;
  std::vector<double> xs_;
  std::vector<double> ys_;
  double offset_ = 0.0;  // shift applied to the argument
  bool complemented_ = false;
  std::optional<double> center_;
};

}  // namespace rclt
