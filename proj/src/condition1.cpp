#include <algorithm>
#include <cmath>

#include "rclt/error.hpp"
#include "rclt/statistics.hpp"
#include "rclt/worst_case.hpp"

namespace rclt {

double condition1_diagnostic(const MeasureSet& set, int n, double delta, const SwitchRule& rule) {
  if (!(delta > 0.0)) fail(ErrorCode::BadParameters, "delta must be positive");
  if (!rule.center.finite())
    fail(ErrorCode::BadParameters, "the band needs a finite centre");
  DpLattice dp(set, n, StatisticSpec::tilde(rule.center));
  const auto& lattice = dp.lattice();
  const Rational exact_delta = exact_from_double(delta);

  double total = 0.0;
  for (int m = 1; m <= n; ++m) {
    const auto& layer = dp.layer(m - 1);
    const Rational t = lattice.threshold(m, rule.center);
    const Rational lo = t - exact_delta;
    const Rational hi = t + exact_delta;
    const double t_d = to_double(t);
    std::vector<double> values(layer.size(), 0.0);
    for (std::size_t i = 0; i < layer.size(); ++i) {
      const auto& s = layer[i];
      const bool in_band = lattice.sign_minus(s, lo, t_d - delta) >= 0 &&
                           lattice.sign_minus(s, hi, t_d + delta) <= 0;
      if (!in_band) continue;
      const bool upper = lattice.rule_selects_upper(s, m, Variant::MTilde, rule.center);
      const std::size_t chosen = upper ? lattice.upper_law() : lattice.lower_law();
      const double mu_tilde = to_double(lattice.law_mean(chosen));
      double worst = 0.0;
      for (std::size_t q = 0; q < lattice.laws(); ++q)
        worst = std::max(worst, std::abs(to_double(lattice.law_mean(q)) - mu_tilde));
      values[i] = worst;
    }
    total += dp.backup_from(m - 1, std::move(values), Objective::sup);
  }
  return total / n;
}

std::vector<DeltaSweepRow> condition1_sweep(const MeasureSet& set, int n,
                                            std::span<const double> deltas,
                                            const SwitchRule& rule) {
  std::vector<DeltaSweepRow> rows;
  for (double d : deltas) rows.push_back({d, condition1_diagnostic(set, n, d, rule)});
  return rows;
}

}  // namespace rclt
