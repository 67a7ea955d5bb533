// rclt: command-line front end for the robust-CLT numerics toolkit.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <omp.h>

#include <acceptance.hpp>
#include <rclt/closed_form.hpp>
#include <rclt/error.hpp>
#include <rclt/hypothesis.hpp>
#include <rclt/kernels.hpp>
#include <rclt/pde_solver.hpp>
#include <rclt/report_io.hpp>
#include <rclt/statistics.hpp>
#include <rclt/worst_case.hpp>

using namespace rclt;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Globals {
  std::string measures;
  std::string p = "3/5";
  std::string q = "3/10";
  std::string output;
  std::string format = "json";
  std::uint64_t seed = 20240613;
  int threads = 0;
};

struct ClosedFormArgs {
  double mu_lo = -0.3, mu_hi = 0.3;
  std::string a = "-1", b = "1", side = "upper";
};

struct PdeArgs {
  double kappa = 0.3;
  std::vector<double> eps = default_eps_sequence();
  std::string a = "-1", b = "1";
  std::vector<double> h{0.05, 0.02};
  int nx = 2001, nt = 2000;
  double domain = 10.0;
  double x0 = 0.0;
};

struct DpArgs {
  std::string theorem = "special";
  std::vector<int> n{40};
  std::string a = "-1", b = "1", c;
  std::string alpha = "1", beta = "1";
  std::string objective = "sup";
  double smooth = 0.0;
  bool exact = false, product = false, timing = false;
  std::optional<double> reference;
  std::vector<double> condition1;
};

struct McArgs {
  std::string theorem = "special";
  int n = 40;
  std::string a = "-1", b = "1", c;
  std::string alpha = "1", beta = "1";
  std::size_t paths = 100000;
  std::vector<std::string> policies{"all"};
};

struct LlnArgs {
  std::vector<int> n{100, 400};
  std::string a = "-1", b = "1";
};

struct HypArgs {
  double kappa = 0.0, alpha = 0.05, theta0 = 0.0, sigma = 1.0;
  std::vector<double> xi{0.5, 1.0, 2.0, 3.0};
  int n = 400;
  std::size_t paths = 0;
  std::string data, trace;
  std::optional<double> a_fixed;
  bool optimize = false;
};

struct ReportArgs {
  std::string suite = "acceptance";
  std::vector<int> criteria;
};

double parse_real(const std::string& s) {
  if (s == "inf" || s == "+inf") return kInf;
  if (s == "-inf") return -kInf;
  try {
    return to_double(parse_rational(s));
  } catch (const Error&) {
    fail(ErrorCode::ConfigError, "not a number: '" + s + "'");
  }
}

std::optional<Rational> parse_exact(const std::string& s) {
  const double d = parse_real(s);
  if (std::isinf(d)) return std::nullopt;
  return parse_rational(s);
}

MeasureSet load_set(const Globals& g) {
  if (!g.measures.empty()) return load_measure_set(g.measures);
  return coin_example(parse_rational(g.p), parse_rational(g.q));
}

// Indicator-type terminal function for [a, b]; mollified when h > 0.
TerminalFunction make_phi(const std::string& a, const std::string& b, double h) {
  const auto ea = parse_exact(a), eb = parse_exact(b);
  if (h > 0.0) return TerminalFunction::smoothed_indicator(parse_real(a), parse_real(b), h);
  if (ea && eb) return TerminalFunction::indicator(*ea, *eb);
  if (eb) return TerminalFunction::left(*eb);
  if (ea) return TerminalFunction::right(*ea);
  return TerminalFunction::constant(1.0);
}

Center make_center(const std::string& c, const std::string& a, const std::string& b) {
  if (c == "inf" || c == "+inf") return Center::plus_infinity();
  if (c == "-inf") return Center::minus_infinity();
  if (!c.empty()) return Center::at(parse_rational(c));
  const auto ea = parse_exact(a), eb = parse_exact(b);
  if (ea && eb) return Center::at(Rational((*ea + *eb) / 2));
  return Center::at(Rational(0));
}

StatisticSpec make_spec(const std::string& theorem, const Center& c, const std::string& alpha,
                        const std::string& beta) {
  switch (theorem_from_string(theorem)) {
    case Theorem::clt: return StatisticSpec::clt();
    case Theorem::special: return StatisticSpec::special(c);
    case Theorem::tilde: return StatisticSpec::tilde(c);
    case Theorem::deviation: return StatisticSpec::deviation();
    case Theorem::lln: return StatisticSpec::lln();
    case Theorem::scaled: return StatisticSpec::scaled(parse_rational(alpha), parse_rational(beta));
  }
  return StatisticSpec::clt();
}

Objective make_objective(const std::string& s) {
  if (s == "sup") return Objective::sup;
  if (s == "inf") return Objective::inf;
  fail(ErrorCode::ConfigError, "objective must be sup or inf");
}

// Limit of the worst case for an indicator of [a, b], when one is known.
std::optional<double> limit_reference(const StatisticSpec& spec, Objective obj,
                                      const AmbiguityInterval& iv, double a, double b, double h) {
  if (h > 0.0) {
    if (spec.theorem != Theorem::deviation) return std::nullopt;
    const double s = std::sqrt(1.0 + h * h);
    return normal_cdf(0.0, b / s) - normal_cdf(0.0, a / s);
  }
  const auto side = [&](const AmbiguityInterval& v, double lo, double hi) {
    return obj == Objective::sup ? upper_indicator_limit(v, lo, hi) : lower_indicator_limit(v, lo, hi);
  };
  switch (spec.theorem) {
    case Theorem::clt:
    case Theorem::special:
    case Theorem::tilde: return side(iv, a, b);
    case Theorem::deviation: return normal_cdf(0.0, b) - normal_cdf(0.0, a);
    case Theorem::lln:
      if (obj == Objective::sup) return (b >= iv.mu_lower && a <= iv.mu_upper) ? 1.0 : 0.0;
      if (a < iv.mu_lower && iv.mu_upper < b) return 1.0;
      if (b < iv.mu_lower || a > iv.mu_upper) return 0.0;
      return std::nullopt;
    case Theorem::scaled: {
      const double al = to_double(spec.alpha), be = to_double(spec.beta);
      return side({be * iv.mu_lower / al, be * iv.mu_upper / al, 1.0}, a / al, b / al);
    }
  }
  return std::nullopt;
}

Json json_number(std::optional<double> x) { return x ? Json(*x) : Json(nullptr); }

// Resolved options of a subcommand (explicit values or defaults).
Json resolved_config(const CLI::App& app, const Globals& g) {
  Json cfg;
  cfg["command"] = app.get_name();
  for (const CLI::Option* opt : app.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help") continue;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      if (res.size() == 1) cfg[name] = res.front();
      else cfg[name] = res;
    } else {
      cfg[name] = opt->get_default_str();
    }
  }
  cfg["measures"] = g.measures.empty() ? "coin(" + g.p + "," + g.q + ")" : g.measures;
  cfg["seed"] = g.seed;
  cfg["threads"] = g.threads;
  return cfg;
}

std::string csv_comment(const Json& config) { return "# rclt " + std::string(version()) + " " + dump_json(config, -1) + "\n"; }

std::string run_closed_form(const ClosedFormArgs& args, const Json& config) {
  const AmbiguityInterval iv{args.mu_lo, args.mu_hi, 1.0};
  const Side side = args.side == "lower" ? Side::lower : Side::upper;
  if (args.side != "upper" && args.side != "lower") fail(ErrorCode::ConfigError, "side must be upper or lower");
  const double a = parse_real(args.a), b = parse_real(args.b);
  const auto ev = evaluate_indicator_limit(iv, a, b, side);
  Json out;
  out["value"] = ev.value;
  out["branch"] = to_string(ev.branch);
  out["kappa"] = ev.kappa;
  out["center"] = ev.center;
  out["provenance"] = provenance("closed_form", side == Side::upper ? "upper_indicator_limit" : "lower_indicator_limit",
                                 Json{{"mu_lower", args.mu_lo}, {"mu_upper", args.mu_hi}, {"a", a}, {"b", b}});
  out["config"] = config;
  return dump_json(out) + "\n";
}

std::string run_pde(const PdeArgs& args, const Json& config) {
  const PdeGrid grid{-args.domain, args.domain, args.nx, args.nt};
  const double a = parse_real(args.a), b = parse_real(args.b);
  const auto lim = mollified_indicator_limit(args.kappa, a, b, args.h, args.eps, grid);
  const double ref = upper_indicator_limit({-args.kappa, args.kappa, 1.0}, a, b);
  Json per_h = Json::array();
  for (std::size_t i = 0; i < lim.bandwidths.size(); ++i) {
    Json row;
    row["h"] = lim.bandwidths[i];
    Json values = Json::array();
    for (std::size_t k = 0; k < lim.sweeps[i].eps.size(); ++k)
      values.push_back(Json{{"eps", lim.sweeps[i].eps[k]}, {"value", lim.sweeps[i].values[k]}});
    row["values"] = values;
    row["extrapolated"] = lim.sweeps[i].extrapolated;
    per_h.push_back(row);
  }
  Json out;
  out["value_per_eps"] = per_h;
  out["extrapolated"] = lim.extrapolated;
  out["closed_form_reference"] = ref;
  Json gaps = Json::array();
  for (const auto& s : lim.sweeps) gaps.push_back(s.extrapolated - ref);
  out["gaps"] = Json{{"per_h", gaps}, {"extrapolated", lim.extrapolated - ref}};
  out["provenance"] = provenance("pde_solver", "mollified_indicator_limit",
                                 Json{{"kappa", args.kappa}, {"a", a}, {"b", b}, {"nx", args.nx}, {"nt", args.nt}});
  out["config"] = config;
  return dump_json(out) + "\n";
}

std::string run_dp(const DpArgs& args, const Globals& g, const Json& config) {
  const MeasureSet set = load_set(g);
  const AmbiguityInterval iv = validate_measure_set(set);
  const auto phi = make_phi(args.a, args.b, args.smooth);
  const auto center = make_center(args.c, args.a, args.b);
  const auto spec = make_spec(args.theorem, center, args.alpha, args.beta);
  const Objective obj = make_objective(args.objective);
  const double a = parse_real(args.a), b = parse_real(args.b);
  std::optional<double> ref = args.reference ? args.reference : limit_reference(spec, obj, iv, a, b, args.smooth);

  if (!args.condition1.empty()) {
    const SwitchRule rule{iv, center};
    const auto rows = condition1_sweep(set, args.n.back(), args.condition1, rule);
    if (g.format == "csv") {
      CsvTable t({"n", "delta", "value"});
      for (const auto& r : rows) t.row({std::to_string(args.n.back()), format_number(r.delta), format_number(r.value)});
      return csv_comment(config) + t.str();
    }
    Json out;
    Json sweep = Json::array();
    for (const auto& r : rows) sweep.push_back(Json{{"delta", r.delta}, {"value", r.value}});
    out["condition1"] = sweep;
    out["provenance"] = provenance("statistics", "condition1_diagnostic", Json{{"n", args.n.back()}});
    out["config"] = config;
    return dump_json(out) + "\n";
  }

  if (args.n.size() > 1 || g.format == "csv") {
    std::vector<int> ns = args.n;
    const auto rep = convergence_report(set, phi, ns, ref.value_or(std::nan("")), spec, obj, args.product);
    std::vector<std::string> header{"n", "dp_value", "reference", "gap"};
    if (args.product) header.push_back("product_value");
    if (args.timing) header.push_back("runtime_seconds");
    CsvTable t(header);
    for (const auto& r : rep.rows) {
      std::vector<std::string> f{std::to_string(r.n), format_number(r.dp_value), ref ? format_number(*ref) : "",
                                 ref ? format_number(r.gap) : ""};
      if (args.product) f.push_back(r.product_value ? format_number(*r.product_value) : "");
      if (args.timing) f.push_back(format_number(r.runtime_seconds));
      t.row(f);
    }
    if (g.format == "csv") return csv_comment(config) + t.str();
    Json out;
    Json rows = Json::array();
    for (const auto& r : rep.rows) {
      Json row{{"n", r.n}, {"dp_value", r.dp_value}, {"gap", ref ? Json(r.gap) : Json(nullptr)}};
      if (r.product_value) row["product_value"] = *r.product_value;
      if (args.timing) row["runtime_seconds"] = r.runtime_seconds;
      rows.push_back(row);
    }
    out["rows"] = rows;
    out["reference"] = json_number(ref);
    out["monotone_gaps"] = rep.monotone_gaps;
    out["provenance"] = provenance("worst_case", "convergence_report", Json{{"theorem", args.theorem}});
    out["config"] = config;
    return dump_json(out) + "\n";
  }

  const auto r = worst_case(set, phi, args.n.front(), spec, obj, args.exact);
  if (r.rounded_keys)
    std::cerr << "warning: outcomes or means are not on an exact lattice; states merged on rounded keys\n";
  Json out;
  out["value"] = r.value;
  if (r.exact_value) out["exact_value"] = rclt::to_string(*r.exact_value);
  out["reference"] = json_number(ref);
  out["gap"] = ref ? Json(std::abs(r.value - *ref)) : Json(nullptr);
  out["states"] = r.states;
  out["rounded_keys"] = r.rounded_keys;
  out["provenance"] = provenance("worst_case", std::string(obj == Objective::sup ? "sup" : "inf") + "_dp_" + args.theorem,
                                 Json{{"n", args.n.front()}, {"phi", phi.describe()}});
  out["config"] = config;
  return dump_json(out) + "\n";
}

std::vector<DriftPolicy> make_policies(const std::vector<std::string>& names, const StatisticSpec& spec,
                                       const MeasureSet& set, const TerminalFunction& phi, int n) {
  const Variant v = spec.theorem == Theorem::tilde ? Variant::MTilde : Variant::M;
  std::vector<DriftPolicy> out;
  for (const auto& name : names) {
    if (name == "all") {
      for (auto& p : builtin_policies(v, spec.center)) out.push_back(p);
    } else if (name == "constant0") out.push_back(DriftPolicy::constant(0));
    else if (name == "constant1") out.push_back(DriftPolicy::constant(1));
    else if (name == "threshold") out.push_back(DriftPolicy::statistic_threshold(v, spec.center));
    else if (name == "reversed") out.push_back(DriftPolicy::reversed_threshold(v, spec.center));
    else if (name == "alternating") out.push_back(DriftPolicy::alternating());
    else if (name == "optimal") {
      DpOptions keep;
      keep.keep_policy = true;
      auto dp = std::make_shared<DpLattice>(set, n, spec, keep);
      dp->solve(phi, Objective::sup);
      out.push_back(DriftPolicy::dp_table(dp));
    } else {
      fail(ErrorCode::ConfigError, "unknown policy '" + name + "'");
    }
  }
  return out;
}

std::string run_mc(const McArgs& args, const Globals& g, const Json& config) {
  const MeasureSet set = load_set(g);
  validate_measure_set(set);
  const auto phi = make_phi(args.a, args.b, 0.0);
  const auto spec = make_spec(args.theorem, make_center(args.c, args.a, args.b), args.alpha, args.beta);
  const double dp = worst_case(set, phi, args.n, spec, Objective::sup).value;
  const auto policies = make_policies(args.policies, spec, set, phi, args.n);
  CsvTable t({"policy", "estimate", "std_error", "paths", "dp_value", "within_3se"});
  Json rows = Json::array();
  for (const auto& p : policies) {
    const auto mc = mc_policy_value(set, p, phi, spec, args.n, args.paths, g.seed);
    const bool ok = mc.estimate <= dp + 3 * mc.std_error;
    t.row({p.name(), format_number(mc.estimate), format_number(mc.std_error), std::to_string(mc.paths),
           format_number(dp), ok ? "true" : "false"});
    rows.push_back(Json{{"policy", p.name()}, {"estimate", mc.estimate}, {"std_error", mc.std_error},
                        {"paths", mc.paths}, {"within_3se", ok}});
  }
  if (g.format == "csv") return csv_comment(config) + t.str();
  Json out;
  out["dp_value"] = dp;
  out["policies"] = rows;
  out["provenance"] = provenance("worst_case", "mc_policy_value", Json{{"theorem", args.theorem}, {"n", args.n}});
  out["config"] = config;
  return dump_json(out) + "\n";
}

std::string run_lln(const LlnArgs& args, const Globals& g, const Json& config) {
  const MeasureSet set = load_set(g);
  const auto iv = validate_measure_set(set);
  const auto phi = make_phi(args.a, args.b, 0.0);
  const double a = parse_real(args.a), b = parse_real(args.b);
  const double limit = (b >= iv.mu_lower && a <= iv.mu_upper) ? 1.0 : 0.0;
  CsvTable t({"n", "sup_value", "limit"});
  Json rows = Json::array();
  for (int n : args.n) {
    const double v = sup_dp_lln(set, phi, n).value;
    t.row({std::to_string(n), format_number(v), format_number(limit)});
    rows.push_back(Json{{"n", n}, {"sup_value", v}});
  }
  if (g.format == "csv") return csv_comment(config) + t.str();
  Json out;
  out["rows"] = rows;
  out["limit"] = limit;
  out["mean_interval"] = Json::array({iv.mu_lower, iv.mu_upper});
  out["provenance"] = provenance("worst_case", "sup_dp_lln", Json{{"a", a}, {"b", b}});
  out["config"] = config;
  return dump_json(out) + "\n";
}

// Error law for simulations: drift ambiguity [-kappa, kappa] on +-1 when
// kappa > 0, a zero-mean four-point law otherwise.
MeasureSet default_errors(double kappa) {
  if (kappa > 0.0) {
    const Rational k = exact_from_double(kappa);
    return coin_example((1 + k) / 2, (1 - k) / 2);
  }
  return MeasureSet({DiscreteMeasure({Rational(-3, 5), Rational(-1, 5), Rational(1, 5), Rational(3, 5)},
                                     {Rational(1, 4), Rational(1, 4), Rational(1, 4), Rational(1, 4)})});
}

std::string run_hyptest(const HypArgs& args, const Globals& g, const Json& config) {
  TestSpec spec;
  spec.kappa = args.kappa;
  spec.alpha = args.alpha;
  spec.theta0 = args.theta0;
  spec.sigma = args.sigma;
  std::optional<MeasureSet> errors;
  if (args.paths > 0) {
    errors = g.measures.empty() ? default_errors(args.kappa) : load_measure_set(g.measures);
    const auto iv = validate_measure_set(*errors);
    spec.kappa = iv.kappa();
    spec.sigma = iv.sigma;
  }
  AcceptanceInterval ab;
  if (args.optimize) {
    const auto opt = optimize_ab(spec, args.xi.empty() ? 1.0 : args.xi.front());
    ab = {opt.a, opt.b};
  } else if (args.a_fixed) {
    ab = calibrate_interval(spec, false, *args.a_fixed);
  } else {
    ab = calibrate_interval(spec);
  }
  Json out;
  out["a"] = ab.a;
  out["b"] = ab.b;
  out["coverage"] = coverage(spec, ab.a, ab.b);
  Json curve = Json::array();
  for (const auto& pt : power_curve(spec, ab.a, ab.b, args.xi)) {
    Json row{{"xi", pt.xi}, {"wrong_acceptance", pt.wrong_acceptance}};
    if (errors) {
      // Worst case over the built-in policies.
      const Center c = Center::at(0.5 * (ab.a + ab.b) - pt.xi);
      double worst = -1.0, se = 0.0;
      for (const auto& p : builtin_policies(Variant::M, c)) {
        const auto mc = size_power_simulation(*errors, spec, ab.a, ab.b, spec.theta0 + pt.xi, args.n, args.paths, g.seed, p);
        if (mc.estimate > worst) {
          worst = mc.estimate;
          se = mc.std_error;
        }
      }
      row["simulated_max_accept_rate"] = worst;
      row["simulated_std_error"] = se;
    }
    curve.push_back(row);
  }
  out["power_curve"] = curve;
  if (errors) {
    const auto size = size_power_simulation(*errors, spec, ab.a, ab.b, spec.theta0, args.n, args.paths, g.seed,
                                            DriftPolicy::statistic_threshold(Variant::M, Center::at(0.5 * (ab.a + ab.b))));
    out["simulated_size"] = Json{{"accept_rate", size.estimate}, {"std_error", size.std_error}};
  }
  if (!args.data.empty()) {
    const auto xs = read_path_csv(args.data);
    const double m = observed_statistic(xs, spec, ab.a, ab.b);
    out["statistic"] = m;
    out["decision"] = to_string(test_decision(m, ab.a, ab.b, PointSet{spec.theta0}));
    if (!args.trace.empty()) {
      const SwitchRule rule{AmbiguityInterval{spec.theta0 - spec.kappa, spec.theta0 + spec.kappa, spec.sigma},
                            Center::at(spec.theta0 + 0.5 * (ab.a + ab.b))};
      const auto rows = statistic_trace(xs, static_cast<int>(xs.size()), rule, Variant::M);
      std::ofstream f(args.trace);
      if (!f) fail(ErrorCode::ConfigError, "cannot write " + args.trace);
      write_trace_csv(f, rows);
    }
  } else {
    out["decision"] = nullptr;
  }
  out["provenance"] = provenance("hypothesis", args.optimize ? "optimize_ab" : "calibrate_interval",
                                 Json{{"kappa", spec.kappa}, {"alpha", spec.alpha}});
  out["config"] = config;
  return dump_json(out) + "\n";
}

std::string run_report(const ReportArgs& args, const Json& config, bool& all_pass) {
  if (args.suite != "acceptance") fail(ErrorCode::ConfigError, "unknown suite '" + args.suite + "'");
  CsvTable t({"id", "criterion", "result", "measured", "limit", "seconds", "time_limit", "detail"});
  all_pass = true;
  for (const auto& r : acceptance::run(args.criteria, [](const acceptance::Result& r) {
         std::cerr << acceptance::format_line(r) << '\n';
       })) {
    all_pass = all_pass && r.pass;
    t.row({std::to_string(r.id), r.name, r.pass ? "pass" : "fail", format_number(r.measured), format_number(r.limit),
           format_number(r.seconds), format_number(r.time_limit), r.detail});
  }
  return csv_comment(config) + t.str();
}

void emit(const std::string& payload, const Globals& g) {
  if (g.output.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream f(g.output, std::ios::binary);
  if (!f) fail(ErrorCode::ConfigError, "cannot write " + g.output);
  f << payload;
}

int error_record(const std::string& kind, const std::string& message, int code) {
  Json e;
  e["error"] = kind;
  e["message"] = message;
  e["exit_code"] = code;
  e["version"] = version();
  std::cerr << dump_json(e, -1) << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerics for central limit theorems under drift ambiguity"};
  app.set_version_flag("--version", std::string(version()));
  app.set_config("--config", "", "TOML/INI config; [subcommand] sections hold subcommand options");
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--measures", g.measures, "Measure-set file (INFO format); default is the coin example");
  app.add_option("--p", g.p, "Coin example favourable probability")->capture_default_str();
  app.add_option("--q", g.q, "Coin example unfavourable probability")->capture_default_str();
  app.add_option("--output,-o", g.output, "Write the report here instead of stdout");
  app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  app.add_option("--seed", g.seed, "Monte Carlo seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Cap on worker threads (0: runtime default)")->check(CLI::NonNegativeNumber);

  ClosedFormArgs cf;
  auto* cf_cmd = app.add_subcommand("closed-form", "Limit of an indicator under drift ambiguity");
  cf_cmd->add_option("--mu-lo", cf.mu_lo)->capture_default_str();
  cf_cmd->add_option("--mu-hi", cf.mu_hi)->capture_default_str();
  cf_cmd->add_option("--a", cf.a, "Left endpoint (may be -inf)")->capture_default_str();
  cf_cmd->add_option("--b", cf.b, "Right endpoint (may be inf)")->capture_default_str();
  cf_cmd->add_option("--side", cf.side)->check(CLI::IsMember({"upper", "lower"}))->capture_default_str();

  PdeArgs pde;
  auto* pde_cmd = app.add_subcommand("pde", "g-expectation of a mollified indicator by finite differences");
  pde_cmd->add_option("--kappa", pde.kappa)->capture_default_str();
  pde_cmd->add_option("--eps", pde.eps, "Decreasing eps sweep")->capture_default_str();
  pde_cmd->add_option("--a", pde.a)->capture_default_str();
  pde_cmd->add_option("--b", pde.b)->capture_default_str();
  pde_cmd->add_option("--bandwidth", pde.h, "Mollifier bandwidths")->capture_default_str();
  pde_cmd->add_option("--nx", pde.nx)->capture_default_str();
  pde_cmd->add_option("--nt", pde.nt)->capture_default_str();
  pde_cmd->add_option("--domain", pde.domain, "Half-width of the spatial domain")->capture_default_str();

  DpArgs dp;
  auto* dp_cmd = app.add_subcommand("dp", "Exact finite-n worst case by backward induction");
  dp_cmd->add_option("--theorem", dp.theorem)
      ->check(CLI::IsMember({"clt", "special", "tilde", "deviation", "lln", "scaled"}))
      ->capture_default_str();
  dp_cmd->add_option("--n", dp.n, "Horizon(s); several give a convergence table")->capture_default_str();
  dp_cmd->add_option("--a", dp.a)->capture_default_str();
  dp_cmd->add_option("--b", dp.b)->capture_default_str();
  dp_cmd->add_option("--c", dp.c, "Switching centre (rational, inf or -inf); default (a+b)/2");
  dp_cmd->add_option("--alpha", dp.alpha, "Scaled statistic: deviation weight")->capture_default_str();
  dp_cmd->add_option("--beta", dp.beta, "Scaled statistic: sample-mean weight")->capture_default_str();
  dp_cmd->add_option("--objective", dp.objective)->check(CLI::IsMember({"sup", "inf"}))->capture_default_str();
  dp_cmd->add_option("--smooth", dp.smooth, "Mollify the indicator with this bandwidth")->capture_default_str();
  dp_cmd->add_flag("--exact", dp.exact, "Also run the recursion in rational arithmetic");
  dp_cmd->add_flag("--product", dp.product, "Add the product-model comparison (n <= 16)");
  dp_cmd->add_flag("--timing", dp.timing, "Report runtimes (breaks byte-identical output)");
  dp_cmd->add_option("--reference", dp.reference, "Override the limit reference");
  dp_cmd->add_option("--condition1", dp.condition1, "Band widths for the condition-1 diagnostic");

  McArgs mc;
  auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo value of drift policies");
  mc_cmd->add_option("--theorem", mc.theorem)
      ->check(CLI::IsMember({"clt", "special", "tilde", "deviation", "lln", "scaled"}))
      ->capture_default_str();
  mc_cmd->add_option("--n", mc.n)->capture_default_str();
  mc_cmd->add_option("--a", mc.a)->capture_default_str();
  mc_cmd->add_option("--b", mc.b)->capture_default_str();
  mc_cmd->add_option("--c", mc.c);
  mc_cmd->add_option("--alpha", mc.alpha)->capture_default_str();
  mc_cmd->add_option("--beta", mc.beta)->capture_default_str();
  mc_cmd->add_option("--paths", mc.paths)->capture_default_str();
  mc_cmd->add_option("--policy", mc.policies,
                     "all, constant0, constant1, threshold, reversed, alternating, optimal")
      ->capture_default_str();

  LlnArgs lln;
  auto* lln_cmd = app.add_subcommand("lln", "Worst-case probability of the sample mean in [a, b]");
  lln_cmd->add_option("--n", lln.n)->capture_default_str();
  lln_cmd->add_option("--a", lln.a)->capture_default_str();
  lln_cmd->add_option("--b", lln.b)->capture_default_str();

  HypArgs hyp;
  auto* hyp_cmd = app.add_subcommand("hyptest", "Calibrate and apply the robust location test");
  hyp_cmd->add_option("--kappa", hyp.kappa)->capture_default_str();
  hyp_cmd->add_option("--alpha", hyp.alpha)->capture_default_str();
  hyp_cmd->add_option("--xi", hyp.xi, "Alternatives for the power curve")->capture_default_str();
  hyp_cmd->add_option("--theta0", hyp.theta0)->capture_default_str();
  hyp_cmd->add_option("--sigma", hyp.sigma)->capture_default_str();
  hyp_cmd->add_option("--n", hyp.n, "Simulation sample size")->capture_default_str();
  hyp_cmd->add_option("--paths", hyp.paths, "Simulation paths (0: closed form only)")->capture_default_str();
  hyp_cmd->add_option("--data", hyp.data, "CSV of observations to test");
  hyp_cmd->add_option("--trace", hyp.trace, "Write the statistic trace of --data here");
  hyp_cmd->add_option("--a-fixed", hyp.a_fixed, "Asymmetric interval with this left endpoint");
  hyp_cmd->add_flag("--optimize", hyp.optimize, "Minimise wrong acceptance at the first xi");

  ReportArgs rep;
  auto* rep_cmd = app.add_subcommand("report", "Run a verification suite and emit pass/fail CSV");
  rep_cmd->add_option("--suite", rep.suite)->check(CLI::IsMember({"acceptance"}))->capture_default_str();
  rep_cmd->add_option("--criteria", rep.criteria, "Subset of criterion ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return error_record("ConfigError", e.what(), 2);
  }

  try {
    if (g.threads > 0) {
      set_thread_cap(g.threads);
      omp_set_num_threads(g.threads);
    }
    CLI::App* cmd = app.get_subcommands().front();
    const Json config = resolved_config(*cmd, g);
    std::string payload;
    int status = 0;
    if (cmd == cf_cmd) payload = run_closed_form(cf, config);
    else if (cmd == pde_cmd) payload = run_pde(pde, config);
    else if (cmd == dp_cmd) payload = run_dp(dp, g, config);
    else if (cmd == mc_cmd) payload = run_mc(mc, g, config);
    else if (cmd == lln_cmd) payload = run_lln(lln, g, config);
    else if (cmd == hyp_cmd) payload = run_hyptest(hyp, g, config);
    else {
      bool all_pass = true;
      payload = run_report(rep, config, all_pass);
      status = all_pass ? 0 : 1;
    }
    emit(payload, g);
    return status;
  } catch (const Error& e) {
    return error_record(std::string(rclt::to_string(e.code())), e.what(), rclt::exit_code(e.code()));
  } catch (const std::exception& e) {
    return error_record("InternalError", e.what(), 1);
  }
}
