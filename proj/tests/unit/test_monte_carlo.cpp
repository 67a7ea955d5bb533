#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include <rclt/worst_case.hpp>

using namespace rclt;

namespace {
MeasureSet coin() { return coin_example(Rational(3, 5), Rational(3, 10)); }
}  // namespace

TEST_CASE("counter streams are uniform and reproducible") {
  double sum = 0.0;
  for (std::uint64_t k = 0; k < 100000; ++k) {
    const double u = counter_uniform(42, k, 3);
    CHECK_UNARY(u >= 0.0);
    CHECK_UNARY(u < 1.0);
    sum += u;
  }
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
  CHECK(counter_uniform(1, 2, 3) == counter_uniform(1, 2, 3));
  CHECK(counter_uniform(1, 2, 3) != counter_uniform(2, 2, 3));
}

TEST_CASE("seeded estimates are bit identical across kernels and runs") {
  const auto phi = TerminalFunction::indicator(-1.0, 1.0);
  const auto spec = StatisticSpec::special(Center::at(0.0));
  const auto policy = DriftPolicy::statistic_threshold(Variant::M, Center::at(0.0));
  const auto a = mc_policy_value(coin(), policy, phi, spec, 20, 20000, 7, false);
  const auto b = mc_policy_value(coin(), policy, phi, spec, 20, 20000, 7, true);
  const auto c = mc_policy_value(coin(), policy, phi, spec, 20, 20000, 7, true);
  CHECK(a.estimate == b.estimate);
  CHECK(a.std_error == b.std_error);
  CHECK(b.estimate == c.estimate);
}

TEST_CASE("singleton law: constant policy matches the DP value") {
  MeasureSet fair({DiscreteMeasure({Rational(1), Rational(-1)}, {Rational(1, 2), Rational(1, 2)})});
  const auto phi = TerminalFunction::indicator(-1.0, 1.0);
  const double dp = sup_dp_clt(fair, phi, 25).value;
  const auto mc = mc_policy_value(fair, DriftPolicy::constant(0), phi, StatisticSpec::clt(), 25, 50000, 3);
  CHECK(std::abs(mc.estimate - dp) <= 3 * mc.std_error);
}

TEST_CASE("sandwich: built-in policies stay below the DP value") {
  const auto phi = TerminalFunction::indicator(-1.0, 1.0);
  const Center c = Center::at(0.0);
  const auto spec = StatisticSpec::special(c);
  const double dp = sup_dp_special(coin(), phi, 30, c).value;
  for (const auto& policy :
       {DriftPolicy::constant(0), DriftPolicy::constant(1), DriftPolicy::statistic_threshold(Variant::M, c),
        DriftPolicy::reversed_threshold(Variant::M, c), DriftPolicy::alternating()}) {
    const auto mc = mc_policy_value(coin(), policy, phi, spec, 30, 20000, 11);
    CHECK_MESSAGE(mc.estimate <= dp + 3 * mc.std_error, policy.name());
  }
}

TEST_CASE("the optimal table policy attains the DP value") {
  const auto phi = TerminalFunction::indicator(-1.0, 1.0);
  DpOptions keep;
  keep.keep_policy = true;
  auto dp = std::make_shared<DpLattice>(coin(), 15, StatisticSpec::clt(), keep);
  const double value = dp->solve(phi, Objective::sup).value;
  const auto policy = DriftPolicy::dp_table(dp);
  const auto mc = mc_policy_value(coin(), policy, phi, StatisticSpec::clt(), 15, 100000, 5);
  CHECK(std::abs(mc.estimate - value) <= 4 * mc.std_error);
  CHECK_THROWS(DriftPolicy::dp_table(std::make_shared<DpLattice>(coin(), 3, StatisticSpec::clt())));
}

TEST_CASE("custom policies") {
  const auto phi = TerminalFunction::indicator(-1.0, 1.0);
  const auto always_lower = DriftPolicy::custom("lower", [](int, const LatticeState&, double) { return std::size_t{1}; });
  const auto a = mc_policy_value(coin(), always_lower, phi, StatisticSpec::clt(), 10, 5000, 9);
  const auto b = mc_policy_value(coin(), DriftPolicy::constant(1), phi, StatisticSpec::clt(), 10, 5000, 9);
  CHECK(a.estimate == b.estimate);
}
