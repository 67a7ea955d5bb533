#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

namespace {

using Big = boost::multiprecision::cpp_bin_float_50;

// erf(z) = 2/sqrt(pi) sum_k (-1)^k z^(2k+1) / (k! (2k+1))
Big erf_series(const Big& z) {
  const Big z2 = z * z;
  Big term = z;  // (-1)^k z^(2k+1) / k!
  Big sum = z;
  for (int k = 1; k < 2000; ++k) {
    term *= -z2 / k;
    const Big add = term / (2 * k + 1);
    sum += add;
    if (abs(add) < Big("1e-45")) break;
  }
  return sum * 2 / sqrt(boost::math::constants::pi<Big>());
}

double phi_std(double x) { return normal_cdf(x); }

}  // namespace

double normal_cdf(double x) {
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  if (x > 9.0) return 1.0;
  if (x < -9.0) {
    // Mills ratio tail for the far left.
    const double t = -x;
    return std::exp(-0.5 * t * t) / (t * std::sqrt(2.0 * M_PI)) *
           (1.0 - 1.0 / (t * t) + 3.0 / (t * t * t * t));
  }
  const Big z = Big(x) / sqrt(Big(2));
  return static_cast<double>((1 + erf_series(z)) / 2);
}

double normal_quantile(double p) {
  double lo = -12.0, hi = 12.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double upper_indicator_direct(double mu_lo, double mu_hi, double a, double b) {
  const double decay = std::exp(-(mu_hi - mu_lo) * (b - a) / 2.0);
  // Phi_m(x) = P(N(m,1) <= x)
  const auto Phi = [](double m, double x) { return phi_std(x - m); };
  if (a + b >= mu_hi + mu_lo) return Phi(-mu_hi, -a) - decay * Phi(-mu_hi, -b);
  return Phi(mu_lo, b) - decay * Phi(mu_lo, a);
}

double gaussian_expectation(const std::function<double(double)>& phi, double mu) {
  const auto f = [&](double x) {
    return phi(x) * std::exp(-0.5 * (x - mu) * (x - mu)) / std::sqrt(2.0 * M_PI);
  };
  double err = 0.0;
  const double left = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, -std::numeric_limits<double>::infinity(), mu, 15, 1e-14, &err);
  const double right = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, mu, std::numeric_limits<double>::infinity(), 15, 1e-14, &err);
  return left + right;
}

double smoothed_indicator_mass(double a, double b, double h, double mu) {
  const double s = std::sqrt(1.0 + h * h);
  return normal_cdf((b - mu) / s) - normal_cdf((a - mu) / s);
}

Model coin(const Q& p, const Q& q) {
  Model m;
  m.values = {Q(1), Q(-1), Q(0)};
  const Q r = 1 - p - q;
  m.laws = {{p, q, r}, {q, p, r}};
  m.sigma2 = p + q - (p - q) * (p - q);
  return m;
}

int sign_plus_root(const Q& A, const Q& B, const Q& r) {
  // A + B / sqrt(r): compare A^2 r with B^2 when signs differ.
  const int sa = sgn(A), sb = sgn(B);
  if (sb == 0) return sa;
  if (sa == 0) return sb;
  if (sa == sb) return sa;
  const Q lhs = A * A * r;
  const Q rhs = B * B;
  if (lhs == rhs) return 0;
  return lhs > rhs ? sa : sb;
}

namespace {

Q law_mean(const Model& model, int q) {
  Q m = 0;
  for (std::size_t w = 0; w < model.values.size(); ++w) m += model.values[w] * model.laws[q][w];
  return m;
}

struct Extremes {
  Q lo, hi;
};

Extremes mean_range(const Model& model) {
  Extremes e{law_mean(model, 0), law_mean(model, 0)};
  for (std::size_t q = 1; q < model.laws.size(); ++q) {
    const Q m = law_mean(model, static_cast<int>(q));
    if (m < e.lo) e.lo = m;
    if (m > e.hi) e.hi = m;
  }
  return e;
}

// r such that s = 1 / sqrt(r): r = sigma^2 n.
Q root_arg(const Model& model, int n) { return model.sigma2 * n; }

bool in_window(const Q& A, const Q& B, const Q& r, const Window& w) {
  return sign_plus_root(A - w.a, B, r) >= 0 && sign_plus_root(A - w.b, B, r) <= 0;
}

// Drift for step i (1-based) from the partial statistic (A, B).
Q rule_drift(const Model& model, int n, const StatDef& stat, int i, const Q& A, const Q& B) {
  const Extremes e = mean_range(model);
  if (stat.center_inf != 0) {
    // +inf: M <= T always; -inf: M~ >= T always. Otherwise never.
    const bool upper = stat.kind == Stat::special ? stat.center_inf > 0 : stat.center_inf < 0;
    return upper ? e.hi : e.lo;
  }
  const Q threshold = -((e.hi + e.lo) / 2) * (1 - Q(i - 1, n)) + stat.center;
  const int sign = sign_plus_root(A - threshold, B, root_arg(model, n));
  const bool upper = stat.kind == Stat::special ? sign <= 0 : sign >= 0;
  return upper ? e.hi : e.lo;
}

struct Weights {
  Q a, b;  // statistic = a * sum x + b * s * sum (x - drift)
};

Weights weights(const StatDef& stat, int n) {
  switch (stat.kind) {
    case Stat::clt:
    case Stat::special:
    case Stat::tilde: return {Q(1, n), Q(1)};
    case Stat::deviation: return {Q(0), Q(1)};
    case Stat::lln: return {Q(1, n), Q(0)};
    case Stat::scaled: return {stat.beta / n, stat.alpha};
  }
  return {};
}

bool rule_based(const StatDef& stat) {
  return stat.kind == Stat::special || stat.kind == Stat::tilde;
}

// Partial statistic after appending outcome x with drift mu.
void append(const Weights& wt, Q& A, Q& B, const Q& x, const Q& mu) {
  A += wt.a * x;
  B += wt.b * (x - mu);
}

Q recurse(const Model& model, int n, const StatDef& stat, const Window& w, bool sup, int m,
          const Q& A, const Q& B) {
  const Q r = root_arg(model, n);
  if (m == n) return in_window(A, B, r, w) ? Q(1) : Q(0);
  const Weights wt = weights(stat, n);
  std::optional<Q> best;
  for (std::size_t q = 0; q < model.laws.size(); ++q) {
    const Q mu = rule_based(stat) ? rule_drift(model, n, stat, m + 1, A, B)
                                  : law_mean(model, static_cast<int>(q));
    Q total = 0;
    for (std::size_t k = 0; k < model.values.size(); ++k) {
      Q a2 = A, b2 = B;
      append(wt, a2, b2, model.values[k], mu);
      total += model.laws[q][k] * recurse(model, n, stat, w, sup, m + 1, a2, b2);
    }
    if (!best || (sup ? total > *best : total < *best)) best = total;
  }
  return *best;
}

}  // namespace

Q history_value(const Model& model, int n, const StatDef& stat, const Window& w, bool sup) {
  if (n < 1 || n > 6) throw std::invalid_argument("history oracle supports 1 <= n <= 6");
  return recurse(model, n, stat, w, sup, 0, Q(0), Q(0));
}

std::pair<Q, Q> path_statistic(const Model& model, int n, const StatDef& stat,
                               const std::vector<int>& outcomes, const std::vector<int>& laws) {
  const Weights wt = weights(stat, n);
  Q A = 0, B = 0;
  for (int i = 0; i < n; ++i) {
    const Q mu = rule_based(stat) ? rule_drift(model, n, stat, i + 1, A, B) : law_mean(model, laws[i]);
    append(wt, A, B, model.values[outcomes[i]], mu);
  }
  return {A, B};
}

Q policy_enumeration_value(const Model& model, int n, const StatDef& stat, const Window& w,
                           bool sup) {
  if (n < 1 || n > 3) throw std::invalid_argument("policy enumeration supports 1 <= n <= 3");
  const int K = static_cast<int>(model.values.size());
  const int L = static_cast<int>(model.laws.size());
  // History nodes of depth < n, indexed breadth first: node(depth, prefix code).
  std::vector<int> offset(n + 1, 0);
  int nodes = 0;
  for (int d = 0, width = 1; d < n; ++d, width *= K) {
    offset[d] = nodes;
    nodes += width;
  }
  long long policies = 1;
  for (int i = 0; i < nodes; ++i) policies *= L;

  const Q r = root_arg(model, n);
  std::optional<Q> best;
  std::vector<int> choice(nodes);
  std::vector<int> outcomes(n), laws(n);
  for (long long code = 0; code < policies; ++code) {
    long long c = code;
    for (int i = 0; i < nodes; ++i) {
      choice[i] = static_cast<int>(c % L);
      c /= L;
    }
    Q total = 0;
    long long paths = 1;
    for (int i = 0; i < n; ++i) paths *= K;
    for (long long p = 0; p < paths; ++p) {
      long long t = p;
      for (int i = 0; i < n; ++i) {
        outcomes[i] = static_cast<int>(t % K);
        t /= K;
      }
      Q prob = 1;
      int prefix = 0;
      for (int i = 0; i < n; ++i) {
        laws[i] = choice[offset[i] + prefix];
        prob *= model.laws[laws[i]][outcomes[i]];
        prefix = prefix * K + outcomes[i];
      }
      const auto [A, B] = path_statistic(model, n, stat, outcomes, laws);
      if (in_window(A, B, r, w)) total += prob;
    }
    if (!best || (sup ? total > *best : total < *best)) best = total;
  }
  return *best;
}

}  // namespace oracle
