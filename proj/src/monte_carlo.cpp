#include <algorithm>
#include <cmath>

#include "rclt/error.hpp"
#include "rclt/worst_case.hpp"

namespace rclt {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  const std::uint64_t key = splitmix64(seed ^ splitmix64(stream * 0xD1B54A32D192ED03ULL));
  const std::uint64_t bits = splitmix64(key + index * 0x9E3779B97F4A7C15ULL);
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

DriftPolicy DriftPolicy::constant(std::size_t q) {
  DriftPolicy p;
  p.kind_ = Kind::constant;
  p.law_ = q;
  p.name_ = "constant(" + std::to_string(q) + ")";
  return p;
}

DriftPolicy DriftPolicy::statistic_threshold(Variant variant, Center center) {
  DriftPolicy p;
  p.kind_ = Kind::threshold;
  p.variant_ = variant;
  p.center_ = std::move(center);
  p.name_ = variant == Variant::M ? "threshold(M)" : "threshold(M~)";
  return p;
}

DriftPolicy DriftPolicy::reversed_threshold(Variant variant, Center center) {
  DriftPolicy p = statistic_threshold(variant, std::move(center));
  p.kind_ = Kind::reversed;
  p.name_ = variant == Variant::M ? "reversed(M)" : "reversed(M~)";
  return p;
}

DriftPolicy DriftPolicy::alternating() {
  DriftPolicy p;
  p.kind_ = Kind::alternating;
  p.name_ = "alternating";
  return p;
}

DriftPolicy DriftPolicy::dp_table(std::shared_ptr<const DpLattice> solved) {
  if (!solved || !solved->has_policy())
    fail(ErrorCode::BadParameters, "dp_table needs a lattice solved with keep_policy");
  DriftPolicy p;
  p.kind_ = Kind::table;
  p.table_ = std::move(solved);
  p.name_ = "dp_optimal";
  return p;
}

DriftPolicy DriftPolicy::custom(std::string name, Chooser chooser) {
  DriftPolicy p;
  p.kind_ = Kind::custom;
  p.name_ = std::move(name);
  p.chooser_ = std::move(chooser);
  return p;
}

std::size_t DriftPolicy::choose(const StatisticLattice& lattice, int m,
                                const LatticeState& state) const {
  switch (kind_) {
    case Kind::constant:
      if (law_ >= lattice.laws()) fail(ErrorCode::BadParameters, "policy law index out of range");
      return law_;
    case Kind::threshold:
    case Kind::reversed: {
      const bool upper = lattice.rule_selects_upper(state, m, variant_, center_);
      return (upper == (kind_ == Kind::threshold)) ? lattice.upper_law() : lattice.lower_law();
    }
    case Kind::alternating: return (m % 2 == 1) ? lattice.upper_law() : lattice.lower_law();
    case Kind::table: {
      const auto i = table_->find(m - 1, state);
      if (!i) fail(ErrorCode::BadParameters, "state missing from the policy table");
      return table_->policy(m - 1, *i);
    }
    case Kind::custom: {
      const std::size_t q = chooser_(m, state, lattice.value(state));
      if (q >= lattice.laws()) fail(ErrorCode::BadParameters, "custom policy returned a bad law");
      return q;
    }
  }
  return 0;
}

namespace {

double simulate_path(const StatisticLattice& lattice, const DriftPolicy& policy,
                     const TerminalFunction& phi, std::uint64_t seed, std::uint64_t path) {
  LatticeState state;
  for (int m = 1; m <= lattice.horizon(); ++m) {
    const std::size_t q = policy.choose(lattice, m, state);
    const double u = counter_uniform(seed, path, static_cast<std::uint64_t>(m));
    const auto& cum = lattice.cumulative(q);
    const auto w = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
    state = lattice.step(state, m, q, std::min(w, cum.size() - 1));
  }
  return lattice.evaluate(phi, state);
}

}  // namespace

void mc_path_values_serial(const StatisticLattice& lattice, const DriftPolicy& policy,
                           const TerminalFunction& phi, std::uint64_t seed,
                           std::span<double> out) {
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = simulate_path(lattice, policy, phi, seed, k);
}

void mc_path_values_parallel(const StatisticLattice& lattice, const DriftPolicy& policy,
                             const TerminalFunction& phi, std::uint64_t seed,
                             std::span<double> out) {
  const auto count = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < count; ++k) {
    const auto i = static_cast<std::size_t>(k);
    out[i] = simulate_path(lattice, policy, phi, seed, i);
  }
}

McEstimate mc_policy_value(const MeasureSet& set, const DriftPolicy& policy,
                           const TerminalFunction& phi, const StatisticSpec& spec, int n,
                           std::size_t paths, std::uint64_t seed, bool parallel) {
  if (paths < 1) fail(ErrorCode::BadParameters, "need at least one path");
  const StatisticLattice lattice(set, n, spec);
  std::vector<double> values(paths);
  if (parallel) mc_path_values_parallel(lattice, policy, phi, seed, values);
  else mc_path_values_serial(lattice, policy, phi, seed, values);

  // Reduction in path order keeps the result independent of thread count.
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(paths);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  McEstimate out;
  out.estimate = mean;
  out.paths = paths;
  out.std_error = paths > 1 ? std::sqrt(ss / static_cast<double>(paths - 1) /
                                        static_cast<double>(paths))
                            : 0.0;
  return out;
}

}  // namespace rclt
