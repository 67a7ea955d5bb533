// Serial vs OpenMP timings for the two hot kernels: the backward layer
// sweep of the worst-case recursion and Monte Carlo path evaluation.

#include <chrono>
#include <cstdio>
#include <string>

#include <CLI11.hpp>
#include <omp.h>

#include <rclt/kernels.hpp>
#include <rclt/measures.hpp>
#include <rclt/terminal.hpp>
#include <rclt/worst_case.hpp>

using namespace rclt;

namespace {

template <class F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    best = std::min(best, dt.count());
  }
  return best;
}

void line(const char* kernel, double serial, double parallel, bool equal) {
  std::printf("%-10s serial=%.4fs parallel=%.4fs speedup=%.2fx threads=%d identical=%s\n", kernel, serial,
              parallel, serial / parallel, omp_get_max_threads(), equal ? "yes" : "NO");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark serial and parallel kernels"};
  int n_dp = 40, n_mc = 200, reps = 3, threads = 0;
  std::size_t paths = 200000;
  app.add_option("--dp-n", n_dp, "Horizon of the clt recursion")->capture_default_str();
  app.add_option("--mc-n", n_mc, "Horizon of the simulated paths")->capture_default_str();
  app.add_option("--paths", paths)->capture_default_str();
  app.add_option("--reps", reps)->capture_default_str();
  app.add_option("--threads", threads);
  CLI11_PARSE(app, argc, argv);
  if (threads > 0) {
    set_thread_cap(threads);
    omp_set_num_threads(threads);
  }

  const MeasureSet set = coin_example(Rational(3, 5), Rational(3, 10));
  const auto phi = TerminalFunction::indicator(Rational(-1), Rational(1));

  DpResult rs, rp;
  DpOptions serial_opt;
  serial_opt.parallel = false;
  DpLattice ls(set, n_dp, StatisticSpec::clt(), serial_opt);
  DpLattice lp(set, n_dp, StatisticSpec::clt());
  const double ts = best_of(reps, [&] { rs = ls.solve(phi, Objective::sup); });
  const double tp = best_of(reps, [&] { rp = lp.solve(phi, Objective::sup); });
  std::printf("dp states=%zu value=%.17g\n", ls.total_states(), rs.value);
  line("dp_layer", ts, tp, rs.value == rp.value);

  const auto spec = StatisticSpec::special(Center::at(Rational(0)));
  const auto policy = DriftPolicy::statistic_threshold(Variant::M, spec.center);
  McEstimate ms, mp;
  const double ms_t = best_of(reps, [&] { ms = mc_policy_value(set, policy, phi, spec, n_mc, paths, 7, false); });
  const double mp_t = best_of(reps, [&] { mp = mc_policy_value(set, policy, phi, spec, n_mc, paths, 7, true); });
  std::printf("mc paths=%zu estimate=%.17g\n", paths, ms.estimate);
  line("mc_paths", ms_t, mp_t, ms.estimate == mp.estimate && ms.std_error == mp.std_error);
  return (rs.value == rp.value && ms.estimate == mp.estimate) ? 0 : 1;
}
