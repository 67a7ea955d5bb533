#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "rclt/measures.hpp"
#include "rclt/rational.hpp"

namespace rclt {

/// Which drift-switching statistic: M (switch to the upper mean below the
/// threshold) or M-tilde (switch to the upper mean above it).
enum class Variant { M, MTilde };

/// Symmetry centre of the terminal function; may be +/- infinity.
class Center {
 public:
  static Center at(Rational c) {
    c.canonicalize();
    return Center(0, std::move(c));
  }
  static Center at(double c);
  static Center plus_infinity() { return Center(+1, Rational(0)); }
  static Center minus_infinity() { return Center(-1, Rational(0)); }

  bool finite() const { return infinite_sign_ == 0; }
  int infinite_sign() const { return infinite_sign_; }
  const Rational& value() const { return value_; }
  double as_double() const;

 private:
  Center(int sign, Rational v) : infinite_sign_(sign), value_(std::move(v)) {}
  int infinite_sign_;
  Rational value_;
};

struct SwitchRule {
  AmbiguityInterval interval;
  Center center = Center::at(Rational(0));

  /// -((mu_upper + mu_lower)/2)(1 - (m-1)/n) + c; infinite when c is.
  double threshold(int m, int n) const;
};

struct StatState {
  int m = 0;
  int n = 1;
  double M = 0.0;
  Variant variant = Variant::M;
};

/// Drift for step m of the M statistic: mu_upper when M_{m-1} <= threshold.
double step_mu(const StatState& state, const SwitchRule& rule);
/// Drift for step m of the M-tilde statistic: mu_upper when M_{m-1} >= threshold.
double step_mu_tilde(const StatState& state, const SwitchRule& rule);
/// Dispatches on state.variant.
double selected_mean(const StatState& state, const SwitchRule& rule);

/// One step of the recursion M_m = M_{m-1} + x/n + (x - mu_m)/(sigma sqrt(n)).
StatState update_statistic(const StatState& state, double x, const SwitchRule& rule);

/// M_{n,n} (or its tilde counterpart) for a full path of length n.
double path_statistic(std::span<const double> xs, int n, const SwitchRule& rule, Variant variant);

struct TraceRow {
  int m = 0;
  double mu = 0.0;
  double M = 0.0;
};

/// (m, mu_m, M_m) for m = 1..n.
std::vector<TraceRow> statistic_trace(std::span<const double> xs, int n, const SwitchRule& rule,
                                      Variant variant);

std::vector<double> read_path_csv(const std::filesystem::path& path);
std::vector<double> parse_path_csv(std::istream& in);
void write_trace_csv(std::ostream& out, std::span<const TraceRow> rows);

// Exact arithmetic.
//
// With rational outcomes and a rational variance the statistic is u + v*s
// with u, v rational and s = 1/(sigma sqrt(n)); only s^2 = 1/(sigma^2 n) is
// needed to compare such numbers exactly.

struct ScaleFactor {
  Rational s_squared;
  double s = 0.0;

  static ScaleFactor for_horizon(const Rational& sigma_squared, int n);
};

/// Sign of a + b*s, exact.
int sign_of(const Rational& a, const Rational& b, const ScaleFactor& scale);

struct ExactSwitchRule {
  Rational mu_lower;
  Rational mu_upper;
  Center center = Center::at(Rational(0));

  Rational threshold(int m, int n) const;  // finite centre only
};

struct ExactStatState {
  int m = 0;
  int n = 1;
  Rational u;  // sample-average part
  Rational v;  // coefficient of s in the deviation part
  Variant variant = Variant::M;

  double value(const ScaleFactor& scale) const { return to_double(u) + to_double(v) * scale.s; }
};

Rational exact_selected_mean(const ExactStatState& state, const ExactSwitchRule& rule,
                             const ScaleFactor& scale);
ExactStatState exact_update(const ExactStatState& state, const Rational& x,
                            const ExactSwitchRule& rule, const ScaleFactor& scale);

/// Diagnostic for the averaged-drift condition that makes the M-tilde limit
/// an equality: (1/n) sum_m sup_Q E_Q[|E_Q[X_m|G_{m-1}] - mu~_m| 1{band}],
/// the band being |M~_{m-1} - threshold(m)| <= delta. Computed exactly by
/// backward induction over the reachable M-tilde states.
double condition1_diagnostic(const MeasureSet& set, int n, double delta, const SwitchRule& rule);

struct DeltaSweepRow {
  double delta = 0.0;
  double value = 0.0;
};
std::vector<DeltaSweepRow> condition1_sweep(const MeasureSet& set, int n,
                                            std::span<const double> deltas,
                                            const SwitchRule& rule);

}  // namespace rclt
