#include "acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <oracles.hpp>
#include <rclt/closed_form.hpp>
#include <rclt/hypothesis.hpp>
#include <rclt/pde_solver.hpp>
#include <rclt/worst_case.hpp>

namespace rclt::acceptance {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

Result make(double measured, double limit, bool pass, std::string detail = {}) {
  Result r;
  r.measured = measured;
  r.limit = limit;
  r.pass = pass;
  r.detail = std::move(detail);
  return r;
}

Result at_most(double measured, double limit, std::string detail = {}) {
  return make(measured, limit, measured <= limit, std::move(detail));
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

MeasureSet coin() { return coin_example(Rational(3, 5), Rational(3, 10)); }

Result closed_form_reduction() {
  std::mt19937_64 rng(20240101);
  std::uniform_real_distribution<double> U(-4.0, 4.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    double a = U(rng), b = U(rng);
    if (a > b) std::swap(a, b);
    const double lib = upper_indicator_limit({0.0, 0.0, 1.0}, a, b);
    worst = std::max(worst, std::abs(lib - (oracle::normal_cdf(b) - oracle::normal_cdf(a))));
  }
  return at_most(worst, 1e-12, "max |E - (Phi(b) - Phi(a))| over 100 intervals");
}

Result branch_continuity() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-2.0, 2.0), K(0.0, 1.5), W(0.05, 4.0);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double lo = U(rng) / 2, hi = lo + K(rng);
    const double d = lo + hi;
    const double half = W(rng) / 2;
    const double a = d / 2 - half, b = d / 2 + half;  // a + b = d
    const AmbiguityInterval iv{lo, hi, 1.0};
    const double kappa = shift_reduce(iv).kappa;
    // Left- and right-branch formulas at the boundary after recentring.
    const double ap = -half, bp = half;
    const double decay = std::exp(-kappa * (bp - ap));
    const double right = oracle::normal_cdf(-ap + kappa) - decay * oracle::normal_cdf(-bp + kappa);
    const double left = oracle::normal_cdf(bp + kappa) - decay * oracle::normal_cdf(ap + kappa);
    const double at = upper_indicator_limit(iv, a, b);
    const double above = upper_indicator_limit(iv, a + 1e-12, b);
    const double below = upper_indicator_limit(iv, a - 1e-12, b);
    worst = std::max({worst, std::abs(right - left), std::abs(at - right), std::abs(above - below)});
  }
  return at_most(worst, 1e-10, "max branch gap at a + b = mu_lower + mu_upper, 50 intervals");
}

Result shift_identity() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> U(-3.0, 3.0), K(0.0, 1.2);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    double a = U(rng), b = U(rng);
    if (a > b) std::swap(a, b);
    if (b - a < 1e-3) b = a + 1e-3;
    const double lo = U(rng) / 2, hi = lo + K(rng);
    const double direct = oracle::upper_indicator_direct(lo, hi, a, b);
    const auto s = shift_reduce({lo, hi, 1.0});
    const double reduced = upper_indicator_limit({-s.kappa, s.kappa, 1.0}, a - s.center, b - s.center);
    const double lib = upper_indicator_limit({lo, hi, 1.0}, a, b);
    worst = std::max({worst, std::abs(direct - reduced), std::abs(lib - direct)});
  }
  return at_most(worst, 1e-12, "direct formula vs recentred evaluation, 100 cases");
}

Result density_consistency() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> K(0.0, 1.5), U(-2.5, 2.5), W(0.1, 4.0);
  double mass_err = 0.0, window_err = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double k = K(rng), a = U(rng), b = a + W(rng);
    const double c = -(a + b) / 2, half = (b - a) / 2;
    const auto q = [&](double z) { return reflected_density(c, k, 1.0, z); };
    const double mass = GK::integrate(q, -kInf, 0.0, 15, 1e-13) + GK::integrate(q, 0.0, kInf, 15, 1e-13);
    const double inside = GK::integrate(q, -half, 0.0, 15, 1e-14) + GK::integrate(q, 0.0, half, 15, 1e-14);
    mass_err = std::max(mass_err, std::abs(mass - 1.0));
    window_err = std::max(window_err, std::abs(inside - upper_indicator_limit({-k, k, 1.0}, a, b)));
  }
  auto r = make(std::max(mass_err / 1e-6, window_err / 1e-8), 1.0, mass_err <= 1e-6 && window_err <= 1e-8,
                "mass err " + fmt("%.3g", mass_err) + ", window err " + fmt("%.3g", window_err) +
                    " (measured = worst ratio to tolerance)");
  return r;
}

Result pde_vs_closed_form() {
  const double hs[] = {0.05, 0.02};
  const auto eps = default_eps_sequence();
  double worst = 0.0;
  double slowest = 0.0;
  std::string detail;
  for (double k : {0.0, 0.3, 0.6}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto lim = mollified_indicator_limit(k, -1.0, 1.0, hs, eps, PdeGrid{});
    slowest = std::max(slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    const double err = std::abs(lim.extrapolated - upper_indicator_limit({-k, k, 1.0}, -1.0, 1.0));
    worst = std::max(worst, err);
    detail += "k=" + fmt("%.1f", k) + " err " + fmt("%.2e", err) + "; ";
  }
  detail += "slowest kappa " + fmt("%.1f", slowest) + " s";
  return make(worst, 5e-3, worst <= 5e-3 && slowest < 30.0, detail);
}

Result dpp_self_check() {
  const auto phi = TerminalFunction::smoothed_indicator(-1.0, 1.0, 0.05);
  std::vector<double> probes;
  for (double x = -3.0; x <= 3.0 + 1e-12; x += 0.25) probes.push_back(x);
  double worst = 0.0;
  for (int m = 1; m <= 4; ++m) worst = std::max(worst, dpp_check(phi, {0.3, 0.05}, PdeGrid{}, 4, m, probes));
  return at_most(worst, 5e-4, "max over m = 1..4 and 25 probes, kappa 0.3, eps 0.05, n 4");
}

struct Variant7 {
  StatisticSpec spec;
  oracle::StatDef def;
};

std::vector<Variant7> oracle_variants() {
  std::vector<Variant7> out;
  const auto def = [](oracle::Stat k, oracle::Q c = 0, int inf = 0) {
    oracle::StatDef d;
    d.kind = k;
    d.center = c;
    d.center_inf = inf;
    return d;
  };
  out.push_back({StatisticSpec::clt(), def(oracle::Stat::clt)});
  out.push_back({StatisticSpec::special(Center::at(Rational(0))), def(oracle::Stat::special)});
  out.push_back({StatisticSpec::special(Center::at(Rational(1, 4))), def(oracle::Stat::special, oracle::Q(1, 4))});
  out.push_back({StatisticSpec::special(Center::plus_infinity()), def(oracle::Stat::special, 0, 1)});
  out.push_back({StatisticSpec::tilde(Center::at(Rational(0))), def(oracle::Stat::tilde)});
  out.push_back({StatisticSpec::tilde(Center::at(Rational(-1, 3))), def(oracle::Stat::tilde, oracle::Q(-1, 3))});
  out.push_back({StatisticSpec::deviation(), def(oracle::Stat::deviation)});
  out.push_back({StatisticSpec::lln(), def(oracle::Stat::lln)});
  auto scaled = def(oracle::Stat::scaled);
  scaled.alpha = oracle::Q(2, 3);
  scaled.beta = oracle::Q(1, 2);
  out.push_back({StatisticSpec::scaled(Rational(2, 3), Rational(1, 2)), scaled});
  return out;
}

Result dp_oracle_equivalence() {
  const auto model = oracle::coin(oracle::Q(3, 5), oracle::Q(3, 10));
  const Rational a(-1, 2), b(1);
  const auto phi = TerminalFunction::indicator(a, b);
  const oracle::Window w{oracle::Q(a.get_mpq_t()), oracle::Q(b.get_mpq_t())};
  int checks = 0, mismatches = 0;
  for (const auto& v : oracle_variants()) {
    for (int n = 1; n <= 6; ++n) {
      DpLattice dp(coin(), n, v.spec);
      for (bool sup : {true, false}) {
        const auto r = dp.solve_exact(phi, sup ? Objective::sup : Objective::inf);
        const oracle::Q got(r.exact_value->get_mpq_t());
        ++checks;
        if (got != oracle::history_value(model, n, v.def, w, sup)) ++mismatches;
        if (n <= 3) {
          ++checks;
          if (got != oracle::policy_enumeration_value(model, n, v.def, w, sup)) ++mismatches;
        }
      }
    }
  }
  return make(mismatches, 0.0, mismatches == 0,
              std::to_string(checks) + " exact comparisons, 9 statistics, sup and inf, n = 1..6");
}

Result clt_convergence_trend() {
  const auto phi = TerminalFunction::indicator(-1.0, 1.0);
  const double ref = upper_indicator_limit({-0.3, 0.3, 0.9}, -1.0, 1.0);
  const int ns[] = {10, 20, 40};
  const auto rep = convergence_report(coin(), phi, ns, ref, StatisticSpec::special(Center::at(0.0)));
  const double g10 = rep.rows[0].gap, g40 = rep.rows[2].gap;
  return make(g40, 0.05, g40 < g10 && g40 <= 0.05,
              "gaps n=10 " + fmt("%.4f", g10) + ", n=20 " + fmt("%.4f", rep.rows[1].gap) + ", n=40 " +
                  fmt("%.4f", g40));
}

Result normal_limit_deviation() {
  const auto phi = TerminalFunction::smoothed_indicator(-1.0, 1.0, 0.1);
  const double ref = oracle::gaussian_expectation([&](double x) { return phi(x); });
  const double dp = sup_dp_deviation(coin(), phi, 40).value;
  return at_most(std::abs(dp - ref), 0.05, "DP " + fmt("%.5f", dp) + " vs quadrature " + fmt("%.5f", ref));
}

Result lln_saturation() {
  const double in = sup_dp_lln(coin(), TerminalFunction::indicator(-1.0, 1.0), 400).value;
  const double out = sup_dp_lln(coin(), TerminalFunction::indicator(0.5, 1.0), 400).value;
  const double slack = std::max(0.95 - in, out - 0.05);
  return make(slack, 0.0, in >= 0.95 && out <= 0.05,
              "intersecting " + fmt("%.6f", in) + ", disjoint " + fmt("%.3g", out));
}

Result mc_sandwich() {
  struct Config {
    MeasureSet set;
    StatisticSpec spec;
    TerminalFunction phi;
    int n;
  };
  const Center c0 = Center::at(0.0);
  const std::vector<Config> configs{
      {coin(), StatisticSpec::special(c0), TerminalFunction::indicator(-1.0, 1.0), 40},
      {coin_example(Rational(1, 2), Rational(1, 4)), StatisticSpec::clt(), TerminalFunction::indicator(-0.5, 1.5), 30},
      {coin(), StatisticSpec::tilde(Center::at(0.5)), TerminalFunction::indicator(0.0, 1.0), 40},
  };
  double worst = -kInf;
  int violations = 0;
  for (const auto& cfg : configs) {
    const double dp = worst_case(cfg.set, cfg.phi, cfg.n, cfg.spec, Objective::sup).value;
    const Variant var = cfg.spec.theorem == Theorem::tilde ? Variant::MTilde : Variant::M;
    const Center& c = cfg.spec.center;
    for (const auto& p : {DriftPolicy::constant(0), DriftPolicy::constant(1), DriftPolicy::statistic_threshold(var, c),
                          DriftPolicy::reversed_threshold(var, c), DriftPolicy::alternating()}) {
      const auto mc = mc_policy_value(cfg.set, p, cfg.phi, cfg.spec, cfg.n, 100000, 2024);
      const double excess = (mc.estimate - dp) / std::max(mc.std_error, 1e-300);
      worst = std::max(worst, excess);
      if (mc.estimate > dp + 3 * mc.std_error) ++violations;
    }
  }
  return make(worst, 3.0, violations == 0,
              "max (estimate - DP) / stderr over 15 policy runs; " + std::to_string(violations) + " violations");
}

Result hypothesis_calibration() {
  TestSpec s;
  s.alpha = 0.05;
  const double b = calibrate_interval(s).b;
  const double b_err = std::abs(b - 1.959964);
  double residual = 0.0;
  for (double k : {0.0, 0.1, 0.3}) {
    s.kappa = k;
    const auto iv = calibrate_interval(s);
    residual = std::max(residual, std::abs(coverage(s, iv.a, iv.b) - 0.95));
  }
  // Singleton error law with zero mean on a fine lattice, sigma^2 = 0.2.
  const MeasureSet errors({DiscreteMeasure({Rational(-3, 5), Rational(-1, 5), Rational(1, 5), Rational(3, 5)},
                                           {Rational(1, 4), Rational(1, 4), Rational(1, 4), Rational(1, 4)})});
  s.kappa = 0.0;
  s.sigma = std::sqrt(0.2);
  const auto iv = calibrate_interval(s);
  const auto sim = size_power_simulation(errors, s, iv.a, iv.b, 0.0, 400, 10000, 12, DriftPolicy::constant(0));
  const bool pass = b_err <= 1e-5 && residual <= 1e-9 && std::abs(sim.estimate - 0.95) <= 0.02;
  return make(std::abs(sim.estimate - 0.95), 0.02, pass,
              "b " + fmt("%.7f", b) + ", residual " + fmt("%.2e", residual) + ", accept rate " +
                  fmt("%.4f", sim.estimate));
}

Result pde_symmetry() {
  const PdeGrid grid;
  double asym = 0.0;
  int violations = 0;
  for (double k : {0.3, 0.6}) {
    for (double h : {0.05, 0.2}) {
      const auto phi = TerminalFunction::smoothed_indicator(-1.0, 1.0, h);
      const auto u = solve_backward(phi.sample(grid.nodes()), {k, 0.05}, grid, 0.0, 1.0, grid.nt).u;
      const int mid = grid.nx / 2;
      for (int i = 0; i < grid.nx; ++i) asym = std::max(asym, std::abs(u[i] - u[grid.nx - 1 - i]));
      for (int i = 1; i < grid.nx; ++i) {
        const double d = u[i] - u[i - 1];
        if ((i <= mid && d < 0.0) || (i > mid && d > 0.0)) ++violations;
      }
    }
  }
  return make(asym, 1e-10, asym <= 1e-10 && violations == 0,
              std::to_string(violations) + " gradient sign violations over 4 solves");
}

}  // namespace

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "closed_form_reduction", 1, closed_form_reduction},
      {2, "branch_continuity", 1, branch_continuity},
      {3, "shift_identity", 1, shift_identity},
      {4, "density_consistency", 10, density_consistency},
      {5, "pde_vs_closed_form", 90, pde_vs_closed_form},
      {6, "dpp_self_check", 60, dpp_self_check},
      {7, "dp_oracle_equivalence", 60, dp_oracle_equivalence},
      {8, "clt_convergence_trend", 300, clt_convergence_trend},
      {9, "normal_limit_deviation", 300, normal_limit_deviation},
      {10, "lln_saturation", 60, lln_saturation},
      {11, "mc_sandwich", 120, mc_sandwich},
      {12, "hypothesis_calibration", 120, hypothesis_calibration},
      {13, "pde_symmetry", 30, pde_symmetry},
  };
  return all;
}

std::vector<Result> run(const std::vector<int>& ids, const std::function<void(const Result&)>& on_result) {
  std::vector<Result> out;
  for (const auto& c : criteria()) {
    if (!ids.empty() && std::find(ids.begin(), ids.end(), c.id) == ids.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = make(kInf, 0.0, false, std::string("error: ") + e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.id = c.id;
    r.name = c.name;
    r.time_limit = c.time_limit;
    if (r.seconds > c.time_limit) {
      r.pass = false;
      r.detail += "; exceeded time limit";
    }
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_line(const Result& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s %2d %-24s measured=%-11.4g limit=%-9.3g time=%.2fs/%gs", r.pass ? "PASS" : "FAIL",
                r.id, r.name.c_str(), r.measured, r.limit, r.seconds, r.time_limit);
  return std::string(buf) + "  " + r.detail;
}

}  // namespace rclt::acceptance
