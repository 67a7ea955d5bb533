#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "rclt/kernels.hpp"
#include "rclt/measures.hpp"
#include "rclt/rational.hpp"
#include "rclt/statistics.hpp"
#include "rclt/terminal.hpp"

namespace rclt {

/// Which finite-n statistic the worst case is taken over.
///   clt        (1/n) sum X + (1/sqrt n) sum (X - E_Q[X|G]) / sigma
///   special    the M statistic, drift from the switching rule
///   tilde      the M-tilde statistic
///   deviation  (1/sqrt n) sum (X - E_Q[X|G]) / sigma
///   lln        (1/n) sum X
///   scaled     (beta/n) sum X + (alpha/sqrt n) sum (X - E_Q[X|G]) / sigma
enum class Theorem { clt, special, tilde, deviation, lln, scaled };

const char* to_string(Theorem t);
Theorem theorem_from_string(std::string_view name);

struct StatisticSpec {
  Theorem theorem = Theorem::clt;
  Rational alpha = 1;
  Rational beta = 1;
  Center center = Center::at(Rational(0));  // special / tilde only

  static StatisticSpec clt() { return {}; }
  static StatisticSpec special(Center c) { return {Theorem::special, 1, 1, std::move(c)}; }
  static StatisticSpec tilde(Center c) { return {Theorem::tilde, 1, 1, std::move(c)}; }
  static StatisticSpec deviation() { return {Theorem::deviation, 1, 0, Center::at(Rational(0))}; }
  static StatisticSpec lln() { return {Theorem::lln, 0, 1, Center::at(Rational(0))}; }
  static StatisticSpec scaled(Rational alpha, Rational beta) {
    return {Theorem::scaled, std::move(alpha), std::move(beta), Center::at(Rational(0))};
  }
};

/// Lattice coordinates of a statistic value: with D the common denominator
/// of outcomes and law means, u = D sum x and v = D sum (x - mu), so
///   M = beta u / (n D) + alpha (v / D) / (sigma sqrt n).
struct LatticeState {
  std::int64_t u = 0;
  std::int64_t v = 0;
  bool operator==(const LatticeState&) const = default;
};

struct LatticeStateHash {
  std::size_t operator()(const LatticeState& s) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(s.u) * 0x9E3779B97F4A7C15ULL;
    h ^= static_cast<std::uint64_t>(s.v) + 0x7F4A7C159E3779B9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

/// Stepping rules of one statistic on the integer lattice; shared by the
/// backward induction and the Monte Carlo engine.
class StatisticLattice {
 public:
  StatisticLattice(const MeasureSet& set, int n, StatisticSpec spec);

  int horizon() const { return n_; }
  const MeasureSet& measures() const { return set_; }
  const StatisticSpec& spec() const { return spec_; }
  std::size_t laws() const { return set_.size(); }
  std::size_t outcomes() const { return set_.outcomes(); }
  /// Whether the next state depends on the chosen law (clt, deviation, scaled).
  bool law_dependent() const { return law_dependent_; }
  /// False when outcomes or means had to be rounded onto a dyadic lattice.
  bool exact() const { return exact_; }
  const BigInt& denominator() const { return denominator_; }

  /// Index of the law with the largest / smallest mean.
  std::size_t upper_law() const { return upper_law_; }
  std::size_t lower_law() const { return lower_law_; }

  /// D * (drift subtracted at step m) when law q is in force.
  std::int64_t mean_step(const LatticeState& state, int m, std::size_t q) const;
  /// Adds outcome w with the given drift step.
  LatticeState advance(const LatticeState& state, std::int64_t mean_step, std::size_t w) const;
  /// State after step m (1-based) from `state` when law q draws outcome w.
  LatticeState step(const LatticeState& state, int m, std::size_t q, std::size_t w) const {
    return advance(state, mean_step(state, m, q), w);
  }

  /// Sign of (statistic - threshold_m(center)), decided exactly.
  int compare_threshold(const LatticeState& state, int m, const Center& center) const;
  /// True when the switching rule of `variant` picks the upper mean at step m.
  bool rule_selects_upper(const LatticeState& state, int m, Variant variant,
                          const Center& center) const;

  double value(const LatticeState& state) const;
  /// phi at the statistic; indicator kinds are decided exactly.
  double evaluate(const TerminalFunction& phi, const LatticeState& state) const;
  Rational evaluate_exact(const TerminalFunction& phi, const LatticeState& state) const;

  /// Sign of statistic - shift (shift_d is its double value), exact.
  int sign_minus(const LatticeState& state, const Rational& shift, double shift_d) const;
  /// -((mu_upper + mu_lower)/2)(1 - (m-1)/n) + c for finite c.
  Rational threshold(int m, const Center& center) const;
  /// Lattice means, D * E_q.
  std::int64_t law_mean_step(std::size_t q) const { return mean_steps_[q]; }
  Rational law_mean(std::size_t q) const { return Rational(BigInt(mean_steps_[q]), denominator_); }

  /// Cumulative double probabilities of law q (for sampling).
  const std::vector<double>& cumulative(std::size_t q) const { return cumulative_[q]; }

 private:
  bool inside(const TerminalFunction& phi, const LatticeState& state) const;

  MeasureSet set_;
  int n_;
  StatisticSpec spec_;
  bool law_dependent_ = false;
  bool track_u_ = true;
  bool track_v_ = true;
  bool exact_ = true;
  BigInt denominator_ = 1;
  std::vector<std::int64_t> outcome_steps_;  // D x_w
  std::vector<std::int64_t> mean_steps_;     // D E_q
  std::vector<std::vector<double>> cumulative_;
  std::size_t upper_law_ = 0;
  std::size_t lower_law_ = 0;
  ScaleFactor scale_;
  Rational u_weight_;  // beta / (n D)
  Rational v_weight_;  // alpha / D
  Rational mid_;       // (mu_upper + mu_lower) / 2 on the lattice
  double u_weight_d_ = 0.0;
  double v_weight_d_ = 0.0;  // alpha s / D
  double mid_d_ = 0.0;
};

struct DpOptions {
  int max_n = 0;                         // 0: per-theorem default cap
  std::size_t max_states = 20'000'000;   // total over all layers
  bool parallel = true;
  bool keep_policy = false;
};

/// Default horizon caps: 60 for clt / deviation / scaled, 2000 otherwise.
int default_horizon_cap(Theorem t);

struct DpResult {
  double value = 0.0;
  std::optional<Rational> exact_value;
  std::size_t states = 0;
  bool rounded_keys = false;
  std::vector<std::size_t> layer_sizes;
};

/// Reachable-state table for exact finite-n worst cases. Layers are built
/// forward once; any number of terminal functions can then be backed up.
class DpLattice {
 public:
  DpLattice(const MeasureSet& set, int n, StatisticSpec spec, const DpOptions& options = {});

  const StatisticLattice& lattice() const { return lattice_; }
  std::size_t total_states() const { return total_states_; }
  std::vector<std::size_t> layer_sizes() const;
  const std::vector<LatticeState>& layer(int m) const { return layers_[static_cast<std::size_t>(m)]; }
  std::optional<std::uint32_t> find(int m, const LatticeState& state) const;

  /// Backward induction with double values. When options.keep_policy is set
  /// the maximising (or minimising) law per state is retained.
  DpResult solve(const TerminalFunction& phi, Objective objective);
  /// Same recursion in exact rational arithmetic.
  DpResult solve_exact(const TerminalFunction& phi, Objective objective);

  /// Backward induction from arbitrary values on layer m down to layer 0.
  double backup_from(int m, std::vector<double> values, Objective objective) const;

  /// Law chosen at step m+1 from layer-m state i by the last solve.
  std::size_t policy(int m, std::uint32_t i) const;
  bool has_policy() const { return !policy_.empty(); }

 private:
  template <class Value>
  DpResult run(const TerminalFunction& phi, Objective objective);

  StatisticLattice lattice_;
  DpOptions options_;
  std::vector<std::vector<LatticeState>> layers_;
  std::vector<std::unordered_map<LatticeState, std::uint32_t, LatticeStateHash>> index_;
  std::vector<std::vector<std::uint32_t>> children_;  // per layer m < n
  std::vector<std::vector<std::uint8_t>> policy_;
  std::size_t stride_ = 0;
  std::size_t total_states_ = 0;
};

/// sup_Q E_Q[phi(...)] for the named statistic.
DpResult sup_dp_clt(const MeasureSet& set, const TerminalFunction& phi, int n,
                    const DpOptions& options = {});
DpResult sup_dp_special(const MeasureSet& set, const TerminalFunction& phi, int n, Center center,
                        const DpOptions& options = {});
DpResult inf_dp_special_tilde(const MeasureSet& set, const TerminalFunction& phi, int n,
                              Center center, const DpOptions& options = {});
DpResult sup_dp_deviation(const MeasureSet& set, const TerminalFunction& phi, int n,
                          const DpOptions& options = {});
DpResult sup_dp_lln(const MeasureSet& set, const TerminalFunction& phi, int n,
                    const DpOptions& options = {});
DpResult sup_dp_scaled(const MeasureSet& set, const TerminalFunction& phi, int n,
                       const Rational& alpha, const Rational& beta, const DpOptions& options = {});

/// Generic entry point.
DpResult worst_case(const MeasureSet& set, const TerminalFunction& phi, int n,
                    const StatisticSpec& spec, Objective objective, bool exact_values = false,
                    const DpOptions& options = {});

/// Best product-model value: one law per coordinate, the same for every
/// history. Enumerates all |L|^n sequences, so n is capped (default 16).
double sup_product_model(const MeasureSet& set, const TerminalFunction& phi, int n,
                         const StatisticSpec& spec, int max_n = 16);

// Monte Carlo policy evaluation.

/// History-dependent choice of a law per step.
class DriftPolicy {
 public:
  using Chooser = std::function<std::size_t(int m, const LatticeState& state, double statistic)>;

  /// Always law q.
  static DriftPolicy constant(std::size_t q);
  /// Upper-mean law when the switching rule (for the given variant and
  /// centre) selects the upper mean, lower-mean law otherwise.
  static DriftPolicy statistic_threshold(Variant variant, Center center);
  /// Opposite choice to statistic_threshold.
  static DriftPolicy reversed_threshold(Variant variant, Center center);
  /// Upper-mean law on odd steps, lower-mean law on even steps.
  static DriftPolicy alternating();
  /// Laws chosen by a solved DpLattice (built with keep_policy).
  static DriftPolicy dp_table(std::shared_ptr<const DpLattice> solved);
  /// Arbitrary table / callback keyed by (step, state).
  static DriftPolicy custom(std::string name, Chooser chooser);

  const std::string& name() const { return name_; }
  /// Law for step m (1-based) given the lattice state after m-1 steps.
  std::size_t choose(const StatisticLattice& lattice, int m, const LatticeState& state) const;

 private:
  enum class Kind { constant, threshold, reversed, alternating, table, custom };
  Kind kind_ = Kind::constant;
  std::string name_;
  std::size_t law_ = 0;
  Variant variant_ = Variant::M;
  Center center_ = Center::at(Rational(0));
  std::shared_ptr<const DpLattice> table_;
  Chooser chooser_;
};

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t paths = 0;
};

/// E_{Q_policy}[phi(statistic)] by simulation. Path k draws from its own
/// counter-based stream keyed by (seed, k); results are reduced in path
/// order, so the serial and parallel kernels agree bit for bit.
McEstimate mc_policy_value(const MeasureSet& set, const DriftPolicy& policy,
                           const TerminalFunction& phi, const StatisticSpec& spec, int n,
                           std::size_t paths, std::uint64_t seed, bool parallel = true);

/// Per-path terminal values (the kernel behind mc_policy_value).
void mc_path_values_serial(const StatisticLattice& lattice, const DriftPolicy& policy,
                           const TerminalFunction& phi, std::uint64_t seed,
                           std::span<double> out);
void mc_path_values_parallel(const StatisticLattice& lattice, const DriftPolicy& policy,
                             const TerminalFunction& phi, std::uint64_t seed,
                             std::span<double> out);

/// Uniform in [0, 1) from the counter (seed, stream, index).
double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

struct ConvergenceRow {
  int n = 0;
  double dp_value = 0.0;
  double gap = 0.0;
  double runtime_seconds = 0.0;
  std::optional<double> product_value;  // exploratory product-model comparison
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  bool monotone_gaps = true;  // flagged, never fatal
};

ConvergenceReport convergence_report(const MeasureSet& set, const TerminalFunction& phi,
                                     std::span<const int> n_list, double limit_reference,
                                     const StatisticSpec& spec = StatisticSpec::clt(),
                                     Objective objective = Objective::sup,
                                     bool include_product_model = false);

}  // namespace rclt
