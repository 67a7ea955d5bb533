#include "rclt/worst_case.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "rclt/error.hpp"

namespace rclt {

const char* to_string(Theorem t) {
  switch (t) {
    case Theorem::clt: return "clt";
    case Theorem::special: return "special";
    case Theorem::tilde: return "tilde";
    case Theorem::deviation: return "deviation";
    case Theorem::lln: return "lln";
    case Theorem::scaled: return "scaled";
  }
  return "?";
}

Theorem theorem_from_string(std::string_view name) {
  for (Theorem t : {Theorem::clt, Theorem::special, Theorem::tilde, Theorem::deviation,
                    Theorem::lln, Theorem::scaled}) {
    if (name == to_string(t)) return t;
  }
  fail(ErrorCode::ConfigError, "unknown theorem '" + std::string(name) + "'");
}

int default_horizon_cap(Theorem t) {
  switch (t) {
    case Theorem::special:
    case Theorem::tilde:
    case Theorem::lln: return 2000;
    default: return 60;
  }
}

namespace {

constexpr std::int64_t kLatticeLimit = std::int64_t{1} << 62;

BigInt ceil_abs(const Rational& r) {
  BigInt num = abs(r.get_num());
  BigInt q = num / r.get_den();
  if (q * r.get_den() != num) ++q;
  return q;
}

std::int64_t scaled_int(const Rational& r, const BigInt& d) {
  // round(r * d); exact when d is a multiple of r's denominator
  Rational x = r * d;
  BigInt floor_part;
  mpz_fdiv_q(floor_part.get_mpz_t(), BigInt(x.get_num() * 2 + x.get_den()).get_mpz_t(),
             BigInt(x.get_den() * 2).get_mpz_t());
  return *to_int64(floor_part);
}

}  // namespace

StatisticLattice::StatisticLattice(const MeasureSet& set, int n, StatisticSpec spec)
    : set_(set), n_(n), spec_(std::move(spec)) {
  if (n < 1) fail(ErrorCode::BadParameters, "horizon n must be at least 1");
  switch (spec_.theorem) {
    case Theorem::clt:
      spec_.alpha = 1;
      spec_.beta = 1;
      law_dependent_ = true;
      break;
    case Theorem::special:
    case Theorem::tilde:
      spec_.alpha = 1;
      spec_.beta = 1;
      break;
    case Theorem::deviation:
      spec_.alpha = 1;
      spec_.beta = 0;
      law_dependent_ = true;
      break;
    case Theorem::lln:
      spec_.alpha = 0;
      spec_.beta = 1;
      break;
    case Theorem::scaled:
      spec_.alpha.canonicalize();
      spec_.beta.canonicalize();
      if (!(spec_.alpha > 0) || spec_.beta < 0)
        fail(ErrorCode::BadParameters, "scaled statistic needs alpha > 0 and beta >= 0");
      law_dependent_ = true;
      break;
  }
  track_u_ = spec_.beta != 0;
  track_v_ = spec_.alpha != 0;

  const Rational sigma2 = set_.common_variance();
  if (!(sigma2 > 0)) fail(ErrorCode::DegenerateSigma, "common variance is zero");
  scale_ = ScaleFactor::for_horizon(sigma2, n);

  std::vector<Rational> means;
  for (std::size_t q = 0; q < set_.size(); ++q) means.push_back(set_.mean(q));
  for (std::size_t q = 1; q < means.size(); ++q) {
    if (means[q] > means[upper_law_]) upper_law_ = q;
    if (means[q] < means[lower_law_]) lower_law_ = q;
  }

  // Common denominator of every outcome and mean; if the resulting integers
  // could overflow over n steps, fall back to a dyadic grid (rounded keys).
  BigInt d = 1;
  BigInt bound = 0;
  for (const auto& x : set_.values()) {
    mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), x.get_den().get_mpz_t());
    bound = std::max(bound, ceil_abs(x));
  }
  BigInt mean_bound = 0;
  for (const auto& mu : means) {
    mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), mu.get_den().get_mpz_t());
    mean_bound = std::max(mean_bound, ceil_abs(mu));
  }
  const BigInt reach = BigInt(n) * (bound + mean_bound + 1);
  if (reach * d >= BigInt(kLatticeLimit)) {
    exact_ = false;
    d = 1;
    for (int k = 0; k < 40 && reach * d * 2 < BigInt(kLatticeLimit); ++k) d *= 2;
    if (reach * d >= BigInt(kLatticeLimit))
      fail(ErrorCode::StateExplosion, "outcome magnitudes too large for the lattice");
  }
  denominator_ = d;
  for (const auto& x : set_.values()) outcome_steps_.push_back(scaled_int(x, d));
  for (const auto& mu : means) mean_steps_.push_back(scaled_int(mu, d));

  for (const auto& law : set_.laws()) {
    std::vector<double> cum;
    double acc = 0.0;
    for (const auto& p : law.probs()) {
      acc += to_double(p);
      cum.push_back(acc);
    }
    cum.back() = 1.0;
    cumulative_.push_back(std::move(cum));
  }

  u_weight_ = spec_.beta / (Rational(d) * n);
  u_weight_.canonicalize();
  v_weight_ = spec_.alpha / Rational(d);
  v_weight_.canonicalize();
  mid_ = Rational(BigInt(mean_steps_[upper_law_]) + BigInt(mean_steps_[lower_law_]),
                  BigInt(2) * d);
  mid_.canonicalize();
  u_weight_d_ = to_double(u_weight_);
  v_weight_d_ = to_double(v_weight_) * scale_.s;
  mid_d_ = to_double(mid_);
}

std::int64_t StatisticLattice::mean_step(const LatticeState& state, int m, std::size_t q) const {
  switch (spec_.theorem) {
    case Theorem::special:
    case Theorem::tilde: {
      const Variant variant = spec_.theorem == Theorem::special ? Variant::M : Variant::MTilde;
      return rule_selects_upper(state, m, variant, spec_.center) ? mean_steps_[upper_law_]
                                                                 : mean_steps_[lower_law_];
    }
    case Theorem::lln: return 0;
    default: return mean_steps_[q];
  }
}

LatticeState StatisticLattice::advance(const LatticeState& state, std::int64_t mean_step,
                                       std::size_t w) const {
  LatticeState next = state;
  if (track_u_) next.u += outcome_steps_[w];
  if (track_v_) next.v += outcome_steps_[w] - mean_step;
  return next;
}

namespace {

// Sign of a + b - shift in doubles when it is clearly away from zero.
int clear_sign(double a, double b, double shift) {
  const double diff = a + b - shift;
  if (std::abs(diff) > 1e-9 * (std::abs(a) + std::abs(b) + std::abs(shift)))
    return diff > 0 ? 1 : -1;
  return 0;
}

}  // namespace

int StatisticLattice::sign_minus(const LatticeState& state, const Rational& shift,
                                 double shift_d) const {
  const int fast = clear_sign(static_cast<double>(state.u) * u_weight_d_,
                              static_cast<double>(state.v) * v_weight_d_, shift_d);
  if (fast != 0) return fast;
  const Rational exact_a = u_weight_ * state.u - shift;
  const Rational exact_b = v_weight_ * state.v;
  return sign_of(exact_a, exact_b, scale_);
}

Rational StatisticLattice::threshold(int m, const Center& center) const {
  if (!center.finite()) fail(ErrorCode::BadParameters, "threshold of an infinite centre");
  Rational t = -mid_ * (1 - Rational(m - 1, n_)) + center.value();
  t.canonicalize();
  return t;
}

int StatisticLattice::compare_threshold(const LatticeState& state, int m,
                                        const Center& center) const {
  if (!center.finite()) return -center.infinite_sign();
  const double t_d = -mid_d_ * (1.0 - static_cast<double>(m - 1) / n_) + center.as_double();
  const int fast = clear_sign(static_cast<double>(state.u) * u_weight_d_,
                              static_cast<double>(state.v) * v_weight_d_, t_d);
  if (fast != 0) return fast;
  return sign_minus(state, threshold(m, center), t_d);
}

bool StatisticLattice::rule_selects_upper(const LatticeState& state, int m, Variant variant,
                                          const Center& center) const {
  const int s = compare_threshold(state, m, center);
  return variant == Variant::M ? s <= 0 : s >= 0;
}

double StatisticLattice::value(const LatticeState& state) const {
  return static_cast<double>(state.u) * u_weight_d_ + static_cast<double>(state.v) * v_weight_d_;
}

bool StatisticLattice::inside(const TerminalFunction& phi, const LatticeState& state) const {
  if (phi.exact_a() && sign_minus(state, *phi.exact_a(), phi.a()) < 0) return false;
  if (phi.exact_b() && sign_minus(state, *phi.exact_b(), phi.b()) > 0) return false;
  return true;
}

double StatisticLattice::evaluate(const TerminalFunction& phi, const LatticeState& state) const {
  if (phi.is_indicator_kind()) {
    const double in = inside(phi, state) ? 1.0 : 0.0;
    return phi.complemented() ? 1.0 - in : in;
  }
  return phi(value(state));
}

Rational StatisticLattice::evaluate_exact(const TerminalFunction& phi,
                                          const LatticeState& state) const {
  if (phi.is_indicator_kind()) {
    const bool in = inside(phi, state);
    return Rational(in != phi.complemented() ? 1 : 0);
  }
  return exact_from_double(phi(value(state)));
}

DpLattice::DpLattice(const MeasureSet& set, int n, StatisticSpec spec, const DpOptions& options)
    : lattice_(set, n, std::move(spec)), options_(options) {
  const int cap = options_.max_n > 0 ? options_.max_n : default_horizon_cap(lattice_.spec().theorem);
  if (n > cap)
    fail(ErrorCode::StateExplosion, "n = " + std::to_string(n) + " exceeds the cap " +
                                        std::to_string(cap) + " for this statistic");
  if (lattice_.laws() > 255) fail(ErrorCode::BadParameters, "at most 255 laws supported");

  const std::size_t laws = lattice_.laws();
  const std::size_t outcomes = lattice_.outcomes();
  const bool by_law = lattice_.law_dependent();
  stride_ = by_law ? laws * outcomes : outcomes;

  layers_.resize(static_cast<std::size_t>(n) + 1);
  index_.resize(static_cast<std::size_t>(n) + 1);
  children_.resize(static_cast<std::size_t>(n));
  layers_[0].push_back(LatticeState{});
  index_[0].emplace(LatticeState{}, 0);
  total_states_ = 1;

  for (int m = 1; m <= n; ++m) {
    const auto& prev = layers_[static_cast<std::size_t>(m - 1)];
    auto& cur = layers_[static_cast<std::size_t>(m)];
    auto& idx = index_[static_cast<std::size_t>(m)];
    auto& kids = children_[static_cast<std::size_t>(m - 1)];
    kids.resize(prev.size() * stride_);
    idx.reserve(prev.size() * 2);
    for (std::size_t i = 0; i < prev.size(); ++i) {
      const std::size_t q_count = by_law ? laws : 1;
      for (std::size_t q = 0; q < q_count; ++q) {
        const std::int64_t mu = lattice_.mean_step(prev[i], m, q);
        for (std::size_t w = 0; w < outcomes; ++w) {
          const LatticeState next = lattice_.advance(prev[i], mu, w);
          auto [it, inserted] = idx.try_emplace(next, static_cast<std::uint32_t>(cur.size()));
          if (inserted) cur.push_back(next);
          kids[i * stride_ + q * outcomes + w] = it->second;
        }
      }
    }
    total_states_ += cur.size();
    if (total_states_ > options_.max_states || cur.size() > std::numeric_limits<std::uint32_t>::max())
      fail(ErrorCode::StateExplosion, "reachable states exceed the cap at step " + std::to_string(m));
  }
}

std::vector<std::size_t> DpLattice::layer_sizes() const {
  std::vector<std::size_t> sizes;
  for (const auto& layer : layers_) sizes.push_back(layer.size());
  return sizes;
}

std::optional<std::uint32_t> DpLattice::find(int m, const LatticeState& state) const {
  const auto& idx = index_.at(static_cast<std::size_t>(m));
  const auto it = idx.find(state);
  if (it == idx.end()) return std::nullopt;
  return it->second;
}

double DpLattice::backup_from(int m, std::vector<double> values, Objective objective) const {
  if (m < 0 || m > lattice_.horizon() ||
      values.size() != layers_[static_cast<std::size_t>(m)].size())
    fail(ErrorCode::BadParameters, "values do not match the layer");
  std::vector<std::vector<double>> probs;
  for (const auto& law : lattice_.measures().laws()) {
    std::vector<double> p;
    for (const auto& x : law.probs()) p.push_back(to_double(x));
    probs.push_back(std::move(p));
  }
  std::vector<double> cur;
  std::vector<std::uint8_t> best;
  for (int k = m - 1; k >= 0; --k) {
    const auto kk = static_cast<std::size_t>(k);
    cur.assign(layers_[kk].size(), 0.0);
    best.assign(layers_[kk].size(), 0);
    const LayerBackup<double> in{children_[kk], stride_, lattice_.outcomes(),
                                 lattice_.law_dependent(), probs, values, objective};
    if (options_.parallel) backup_layer_parallel<double>(in, cur, best);
    else backup_layer_serial<double>(in, cur, best);
    values.swap(cur);
  }
  return values[0];
}

std::size_t DpLattice::policy(int m, std::uint32_t i) const {
  return policy_.at(static_cast<std::size_t>(m)).at(i);
}

template <class Value>
DpResult DpLattice::run(const TerminalFunction& phi, Objective objective) {
  const int n = lattice_.horizon();
  const auto& terminal_layer = layers_[static_cast<std::size_t>(n)];
  std::vector<Value> next(terminal_layer.size());
  for (std::size_t i = 0; i < terminal_layer.size(); ++i) {
    if constexpr (std::is_same_v<Value, Rational>)
      next[i] = lattice_.evaluate_exact(phi, terminal_layer[i]);
    else
      next[i] = lattice_.evaluate(phi, terminal_layer[i]);
  }

  std::vector<std::vector<Value>> probs;
  for (const auto& law : lattice_.measures().laws()) {
    std::vector<Value> p;
    for (const auto& x : law.probs()) {
      if constexpr (std::is_same_v<Value, Rational>) p.push_back(x);
      else p.push_back(to_double(x));
    }
    probs.push_back(std::move(p));
  }

  if (options_.keep_policy) policy_.assign(static_cast<std::size_t>(n), {});
  std::vector<Value> cur;
  std::vector<std::uint8_t> best;
  for (int m = n - 1; m >= 0; --m) {
    const auto mm = static_cast<std::size_t>(m);
    cur.assign(layers_[mm].size(), Value{});
    best.assign(layers_[mm].size(), 0);
    const LayerBackup<Value> in{children_[mm], stride_, lattice_.outcomes(),
                                lattice_.law_dependent(), probs, next, objective};
    if (options_.parallel) backup_layer_parallel<Value>(in, cur, best);
    else backup_layer_serial<Value>(in, cur, best);
    if (options_.keep_policy) policy_[mm] = best;
    next.swap(cur);
  }

  DpResult out;
  out.states = total_states_;
  out.rounded_keys = !lattice_.exact();
  out.layer_sizes = layer_sizes();
  if constexpr (std::is_same_v<Value, Rational>) {
    out.exact_value = next[0];
    out.value = to_double(next[0]);
  } else {
    out.value = next[0];
  }
  return out;
}

DpResult DpLattice::solve(const TerminalFunction& phi, Objective objective) {
  return run<double>(phi, objective);
}

DpResult DpLattice::solve_exact(const TerminalFunction& phi, Objective objective) {
  return run<Rational>(phi, objective);
}

DpResult worst_case(const MeasureSet& set, const TerminalFunction& phi, int n,
                    const StatisticSpec& spec, Objective objective, bool exact_values,
                    const DpOptions& options) {
  DpLattice dp(set, n, spec, options);
  return exact_values ? dp.solve_exact(phi, objective) : dp.solve(phi, objective);
}

DpResult sup_dp_clt(const MeasureSet& set, const TerminalFunction& phi, int n,
                    const DpOptions& options) {
  return worst_case(set, phi, n, StatisticSpec::clt(), Objective::sup, false, options);
}

DpResult sup_dp_special(const MeasureSet& set, const TerminalFunction& phi, int n, Center center,
                        const DpOptions& options) {
  return worst_case(set, phi, n, StatisticSpec::special(std::move(center)), Objective::sup, false,
                    options);
}

DpResult inf_dp_special_tilde(const MeasureSet& set, const TerminalFunction& phi, int n,
                              Center center, const DpOptions& options) {
  return worst_case(set, phi, n, StatisticSpec::tilde(std::move(center)), Objective::inf, false,
                    options);
}

DpResult sup_dp_deviation(const MeasureSet& set, const TerminalFunction& phi, int n,
                          const DpOptions& options) {
  return worst_case(set, phi, n, StatisticSpec::deviation(), Objective::sup, false, options);
}

DpResult sup_dp_lln(const MeasureSet& set, const TerminalFunction& phi, int n,
                    const DpOptions& options) {
  return worst_case(set, phi, n, StatisticSpec::lln(), Objective::sup, false, options);
}

DpResult sup_dp_scaled(const MeasureSet& set, const TerminalFunction& phi, int n,
                       const Rational& alpha, const Rational& beta, const DpOptions& options) {
  return worst_case(set, phi, n, StatisticSpec::scaled(alpha, beta), Objective::sup, false,
                    options);
}

double sup_product_model(const MeasureSet& set, const TerminalFunction& phi, int n,
                         const StatisticSpec& spec, int max_n) {
  if (n > max_n)
    fail(ErrorCode::StateExplosion, "product-model enumeration capped at n = " +
                                        std::to_string(max_n));
  const StatisticLattice lattice(set, n, spec);
  const std::size_t laws = lattice.laws();
  std::vector<std::vector<double>> probs;
  for (const auto& law : set.laws()) {
    std::vector<double> p;
    for (const auto& x : law.probs()) p.push_back(to_double(x));
    probs.push_back(std::move(p));
  }
  std::uint64_t sequences = 1;
  for (int i = 0; i < n; ++i) sequences *= laws;

  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> seq(static_cast<std::size_t>(n));
  for (std::uint64_t code = 0; code < sequences; ++code) {
    std::uint64_t c = code;
    for (auto& q : seq) {
      q = static_cast<std::size_t>(c % laws);
      c /= laws;
    }
    // Forward law of the statistic under this product measure.
    std::unordered_map<LatticeState, double, LatticeStateHash> dist{{LatticeState{}, 1.0}};
    for (int m = 1; m <= n; ++m) {
      std::unordered_map<LatticeState, double, LatticeStateHash> next;
      const std::size_t q = seq[static_cast<std::size_t>(m - 1)];
      for (const auto& [state, mass] : dist) {
        const std::int64_t mu = lattice.mean_step(state, m, q);
        for (std::size_t w = 0; w < lattice.outcomes(); ++w)
          next[lattice.advance(state, mu, w)] += mass * probs[q][w];
      }
      dist.swap(next);
    }
    double value = 0.0;
    for (const auto& [state, mass] : dist) value += mass * lattice.evaluate(phi, state);
    best = std::max(best, value);
  }
  return best;
}

ConvergenceReport convergence_report(const MeasureSet& set, const TerminalFunction& phi,
                                     std::span<const int> n_list, double limit_reference,
                                     const StatisticSpec& spec, Objective objective,
                                     bool include_product_model) {
  for (std::size_t i = 1; i < n_list.size(); ++i)
    if (!(n_list[i] > n_list[i - 1]))
      fail(ErrorCode::BadParameters, "n list must be increasing");
  ConvergenceReport report;
  for (int n : n_list) {
    const auto start = std::chrono::steady_clock::now();
    const auto result = worst_case(set, phi, n, spec, objective);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    ConvergenceRow row;
    row.n = n;
    row.dp_value = result.value;
    row.gap = std::abs(result.value - limit_reference);
    row.runtime_seconds = elapsed.count();
    if (include_product_model && n <= 16) row.product_value = sup_product_model(set, phi, n, spec);
    if (!report.rows.empty() && row.gap > report.rows.back().gap) report.monotone_gaps = false;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace rclt
