#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include <oracles.hpp>
#include <rclt/error.hpp>
#include <rclt/measures.hpp>
#include <rclt/statistics.hpp>

using namespace rclt;

namespace {

const AmbiguityInterval kCoin{-0.3, 0.3, 0.9};

SwitchRule rule_at(double c) { return SwitchRule{kCoin, Center::at(c)}; }

}  // namespace

TEST_CASE("step_mu boundary and sentinel centres") {
  StatState s{0, 10, 0.0, Variant::M};
  CHECK(step_mu(s, rule_at(0.0)) == 0.3);
  s.M = 0.1;
  CHECK(step_mu(s, rule_at(0.0)) == -0.3);
  CHECK(step_mu(s, SwitchRule{kCoin, Center::plus_infinity()}) == 0.3);
  CHECK(step_mu(s, SwitchRule{kCoin, Center::minus_infinity()}) == -0.3);
}

TEST_CASE("step_mu_tilde boundary and sentinel centres") {
  StatState s{0, 10, 0.0, Variant::MTilde};
  CHECK(step_mu_tilde(s, rule_at(0.0)) == 0.3);
  s.M = -0.1;
  CHECK(step_mu_tilde(s, rule_at(0.0)) == -0.3);
  CHECK(step_mu_tilde(s, SwitchRule{kCoin, Center::minus_infinity()}) == 0.3);
}

TEST_CASE("threshold tracks the interval midpoint") {
  const SwitchRule r{AmbiguityInterval{0.0, 0.6, 0.9}, Center::at(0.5)};
  CHECK(r.threshold(1, 4) == doctest::Approx(-0.3 + 0.5));
  CHECK(r.threshold(3, 4) == doctest::Approx(-0.3 * 0.5 + 0.5));
  CHECK(std::isinf(SwitchRule{kCoin, Center::plus_infinity()}.threshold(1, 4)));
}

TEST_CASE("one-step coin paths") {
  const double expected[] = {16.0 / 9.0, -22.0 / 9.0, -1.0 / 3.0};
  const double xs[] = {1.0, -1.0, 0.0};
  for (int k = 0; k < 3; ++k) {
    const double x[] = {xs[k]};
    CHECK(path_statistic(x, 1, rule_at(0.0), Variant::M) == doctest::Approx(expected[k]).epsilon(1e-15));
  }
}

TEST_CASE("update_statistic refuses to pass the horizon") {
  StatState s{1, 1, 0.0, Variant::M};
  try {
    update_statistic(s, 1.0, rule_at(0.0));
    FAIL("expected HorizonExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::HorizonExceeded);
  }
  const double xs[] = {1.0, 0.0};
  CHECK_THROWS_AS(path_statistic(xs, 3, rule_at(0.0), Variant::M), Error);
}

TEST_CASE("zero deviation leaves only the sample-mean increment") {
  StatState s{0, 5, 0.0, Variant::M};
  const auto next = update_statistic(s, 0.3, rule_at(0.0));
  CHECK(next.M == doctest::Approx(0.3 / 5).epsilon(1e-15));
  CHECK(next.m == 1);
}

TEST_CASE("singleton interval gives the studentized form") {
  const SwitchRule r{AmbiguityInterval{0.2, 0.2, 1.5}, Center::at(0.0)};
  const std::vector<double> xs{1.0, -0.5, 2.0, 0.25, -1.0, 0.0};
  const int n = static_cast<int>(xs.size());
  double sum = 0.0, dev = 0.0;
  for (double x : xs) {
    sum += x;
    dev += (x - 0.2) / 1.5;
  }
  const double direct = sum / n + dev / std::sqrt(static_cast<double>(n));
  CHECK(path_statistic(xs, n, r, Variant::M) == doctest::Approx(direct).epsilon(1e-14));
  CHECK(path_statistic(xs, n, r, Variant::MTilde) == doctest::Approx(direct).epsilon(1e-14));
}

TEST_CASE("exact fold matches exhaustive enumeration at n = 8") {
  const int n = 8;
  const auto model = oracle::coin(oracle::Q(3, 5), oracle::Q(3, 10));
  const ExactSwitchRule rule{Rational(-3, 10), Rational(3, 10), Center::at(Rational(1, 4))};
  const auto scale = ScaleFactor::for_horizon(Rational(81, 100), n);
  const SwitchRule drule{kCoin, Center::at(0.25)};
  for (Variant variant : {Variant::M, Variant::MTilde}) {
    oracle::StatDef def;
    def.kind = variant == Variant::M ? oracle::Stat::special : oracle::Stat::tilde;
    def.center = oracle::Q(1, 4);
    int mismatches = 0;
    std::vector<int> w(n), laws(n, 0);
    for (int code = 0; code < 6561; ++code) {
      int c = code;
      std::vector<double> xs;
      ExactStatState s{0, n, Rational(0), Rational(0), variant};
      for (int i = 0; i < n; ++i) {
        w[i] = c % 3;
        c /= 3;
        s = exact_update(s, model.values[w[i]], rule, scale);
        xs.push_back(model.values[w[i]].get_d());
      }
      const auto [A, B] = oracle::path_statistic(model, n, def, w, laws);
      if (s.u != A || s.v != B) ++mismatches;
      const double folded = path_statistic(xs, n, drule, variant);
      if (std::abs(folded - s.value(scale)) > 1e-12) ++mismatches;
    }
    CHECK(mismatches == 0);
  }
}

TEST_CASE("exact sign of a + b s") {
  const auto scale = ScaleFactor::for_horizon(Rational(81, 100), 4);  // s = 1/1.8
  CHECK(sign_of(Rational(-5, 9), Rational(1), scale) == 0);
  CHECK(sign_of(Rational(-5, 9) + Rational(1, 1000000000), Rational(1), scale) == 1);
  CHECK(sign_of(Rational(1), Rational(-9, 5), scale) == 0);
  CHECK(sign_of(Rational(0), Rational(-1), scale) == -1);
}

TEST_CASE("recentring reproduces the selected means") {
  // Interval [0, 0.6]; Y = X - 0.3 with centre c - 0.3 sees [-0.3, 0.3].
  // Exact arithmetic: this path hits M = threshold exactly at m = 6.
  const int n = 12;
  const auto scale = ScaleFactor::for_horizon(Rational(81, 100), n);
  const ExactSwitchRule raw{Rational(0), Rational(3, 5), Center::at(Rational(2, 5))};
  const ExactSwitchRule centred{Rational(-3, 10), Rational(3, 10), Center::at(Rational(1, 10))};
  const int xs[] = {1, 0, 1, 1, 0, 0, 1, 1, 1, 0, 1, 0};
  for (Variant v : {Variant::M, Variant::MTilde}) {
    ExactStatState a{0, n, Rational(0), Rational(0), v}, b = a;
    for (int x : xs) {
      CHECK(exact_selected_mean(a, raw, scale) - Rational(3, 10) == exact_selected_mean(b, centred, scale));
      a = exact_update(a, Rational(x), raw, scale);
      b = exact_update(b, Rational(x) - Rational(3, 10), centred, scale);
    }
  }
}

TEST_CASE("trace csv round trip") {
  std::istringstream in("x\n1\n-1\n0\n1\n");
  const auto xs = parse_path_csv(in);
  REQUIRE(xs.size() == 4);
  const auto rows = statistic_trace(xs, 4, rule_at(0.0), Variant::M);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].mu == 0.3);
  std::ostringstream out;
  write_trace_csv(out, rows);
  CHECK(out.str().rfind("m,mu_m,M_m\n1,0.29999999999999999,", 0) == 0);
}

TEST_CASE("condition-1 diagnostic") {
  SUBCASE("vanishes without ambiguity") {
    MeasureSet fair({DiscreteMeasure({Rational(1), Rational(-1), Rational(0)},
                                     {Rational(2, 5), Rational(2, 5), Rational(1, 5)})});
    const SwitchRule r{AmbiguityInterval{0, 0, std::sqrt(0.8)}, Center::at(0.0)};
    CHECK(condition1_diagnostic(fair, 10, 0.5, r) == 0.0);
  }
  SUBCASE("decreases with the band width on the coin") {
    const auto coin = coin_example(Rational(3, 5), Rational(3, 10));
    const double deltas[] = {0.4, 0.2, 0.1, 0.05};
    const auto rows = condition1_sweep(coin, 20, deltas, rule_at(0.0));
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].value <= rows[i - 1].value);
    CHECK(rows[2].value > 0.0);
  }
  SUBCASE("empty band for a tiny width off the lattice") {
    const auto coin = coin_example(Rational(3, 5), Rational(3, 10));
    CHECK(condition1_diagnostic(coin, 20, 1e-12, SwitchRule{kCoin, Center::at(Rational(1, 7))}) == 0.0);
  }
}
