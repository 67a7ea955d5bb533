#include "rclt/statistics.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "rclt/error.hpp"

namespace rclt {

Center Center::at(double c) {
  if (std::isinf(c)) return c > 0 ? plus_infinity() : minus_infinity();
  return at(exact_from_double(c));
}

double Center::as_double() const {
  if (infinite_sign_ > 0) return std::numeric_limits<double>::infinity();
  if (infinite_sign_ < 0) return -std::numeric_limits<double>::infinity();
  return to_double(value_);
}

double SwitchRule::threshold(int m, int n) const {
  if (!center.finite()) return center.as_double();
  const double mid = 0.5 * (interval.mu_upper + interval.mu_lower);
  return -mid * (1.0 - static_cast<double>(m - 1) / n) + center.as_double();
}

double step_mu(const StatState& state, const SwitchRule& rule) {
  return state.M <= rule.threshold(state.m + 1, state.n) ? rule.interval.mu_upper
                                                           : rule.interval.mu_lower;
}

double step_mu_tilde(const StatState& state, const SwitchRule& rule) {
  return state.M >= rule.threshold(state.m + 1, state.n) ? rule.interval.mu_upper
                                                           : rule.interval.mu_lower;
}

double selected_mean(const StatState& state, const SwitchRule& rule) {
  return state.variant == Variant::M ? step_mu(state, rule) : step_mu_tilde(state, rule);
}

StatState update_statistic(const StatState& state, double x, const SwitchRule& rule) {
  if (state.m >= state.n) fail(ErrorCode::HorizonExceeded, "statistic already at step n");
  const long double root_n = std::sqrt(static_cast<long double>(state.n));
  const double mu = selected_mean(state, rule);
  StatState next = state;
  next.M = static_cast<double>(state.M + static_cast<long double>(x) / state.n +
                               (static_cast<long double>(x) - mu) /
                                   (static_cast<long double>(rule.interval.sigma) * root_n));
  next.m = state.m + 1;
  return next;
}

double path_statistic(std::span<const double> xs, int n, const SwitchRule& rule, Variant variant) {
  if (xs.size() != static_cast<std::size_t>(n))
    fail(ErrorCode::LengthMismatch, "path length " + std::to_string(xs.size()) + " != n = " +
                                        std::to_string(n));
  StatState state{0, n, 0.0, variant};
  for (double x : xs) state = update_statistic(state, x, rule);
  return state.M;
}

std::vector<TraceRow> statistic_trace(std::span<const double> xs, int n, const SwitchRule& rule,
                                      Variant variant) {
  if (xs.size() != static_cast<std::size_t>(n))
    fail(ErrorCode::LengthMismatch, "path length does not match n");
  std::vector<TraceRow> rows;
  rows.reserve(xs.size());
  StatState state{0, n, 0.0, variant};
  for (double x : xs) {
    const double mu = selected_mean(state, rule);
    state = update_statistic(state, x, rule);
    rows.push_back({state.m, mu, state.M});
  }
  return rows;
}

std::vector<double> parse_path_csv(std::istream& in) {
  std::vector<double> xs;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    // First cell of each row; an optional non-numeric header is skipped.
    std::string cell = line.substr(0, line.find(','));
    if (cell.size() >= 2 && cell.front() == '"' && cell.back() == '"')
      cell = cell.substr(1, cell.size() - 2);
    try {
      std::size_t used = 0;
      const double x = std::stod(cell, &used);
      if (used != cell.size()) throw std::invalid_argument(cell);
      xs.push_back(x);
    } catch (const std::exception&) {
      if (!first) fail(ErrorCode::ConfigError, "bad observation '" + cell + "'");
    }
    first = false;
  }
  return xs;
}

std::vector<double> read_path_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigError, "cannot open " + path.string());
  return parse_path_csv(in);
}

void write_trace_csv(std::ostream& out, std::span<const TraceRow> rows) {
  out << "m,mu_m,M_m\n";
  out.precision(17);
  for (const auto& row : rows) out << row.m << ',' << row.mu << ',' << row.M << '\n';
}

ScaleFactor ScaleFactor::for_horizon(const Rational& sigma_squared, int n) {
  ScaleFactor f;
  f.s_squared = 1 / (sigma_squared * n);
  f.s_squared.canonicalize();
  f.s = static_cast<double>(1.0L / std::sqrt(static_cast<long double>(to_double(sigma_squared)) *
                                             static_cast<long double>(n)));
  return f;
}

int sign_of(const Rational& a, const Rational& b, const ScaleFactor& scale) {
  const int sa = sgn(a);
  const int sb = sgn(b);
  if (sb == 0) return sa;
  if (sa == 0 || sa == sb) return sb;
  // Opposite signs: compare a^2 with b^2 s^2. A double pass settles all but
  // near-ties.
  const double ad = to_double(a);
  const double bd = to_double(b) * scale.s;
  const double sum = ad + bd;
  if (std::abs(sum) > 1e-9 * (std::abs(ad) + std::abs(bd))) return sum > 0 ? 1 : -1;
  const Rational lhs = a * a;
  const Rational rhs = b * b * scale.s_squared;
  const int c = cmp(lhs, rhs);
  if (c == 0) return 0;
  return c > 0 ? sa : sb;
}

Rational ExactSwitchRule::threshold(int m, int n) const {
  Rational t = -(mu_upper + mu_lower) / 2 * (1 - Rational(m - 1, n)) + center.value();
  t.canonicalize();
  return t;
}

Rational exact_selected_mean(const ExactStatState& state, const ExactSwitchRule& rule,
                             const ScaleFactor& scale) {
  bool upper;
  if (!rule.center.finite()) {
    upper = true;  // c = +inf for M, c = -inf for M-tilde: constant upper mean
    if (state.variant == Variant::M) upper = rule.center.infinite_sign() > 0;
    else upper = rule.center.infinite_sign() < 0;
  } else {
    const int s = sign_of(state.u - rule.threshold(state.m + 1, state.n), state.v, scale);
    upper = state.variant == Variant::M ? s <= 0 : s >= 0;
  }
  return upper ? rule.mu_upper : rule.mu_lower;
}

ExactStatState exact_update(const ExactStatState& state, const Rational& x,
                            const ExactSwitchRule& rule, const ScaleFactor& scale) {
  if (state.m >= state.n) fail(ErrorCode::HorizonExceeded, "statistic already at step n");
  const Rational mu = exact_selected_mean(state, rule, scale);
  ExactStatState next = state;
  next.u = state.u + x / state.n;
  next.u.canonicalize();
  next.v = state.v + (x - mu);
  next.m = state.m + 1;
  return next;
}

}  // namespace rclt
