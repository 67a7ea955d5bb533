#include "rclt/measures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/property_tree/info_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "rclt/error.hpp"

namespace rclt {

DiscreteMeasure::DiscreteMeasure(std::vector<Rational> values, std::vector<Rational> probs)
    : values_(std::move(values)), probs_(std::move(probs)) {
  for (auto& v : values_) v.canonicalize();
  for (auto& p : probs_) p.canonicalize();
  if (values_.empty() || values_.size() != probs_.size())
    fail(ErrorCode::InvalidMeasure, "values and probabilities must have equal, nonzero length");
  Rational total = 0;
  for (const auto& p : probs_) {
    if (p < 0 || p > 1) fail(ErrorCode::InvalidMeasure, "probability outside [0,1]: " + to_string(p));
    total += p;
  }
  if (std::abs(to_double(total - 1)) > 1e-12)
    fail(ErrorCode::InvalidMeasure, "probabilities sum to " + to_string(total));
  auto sorted = values_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    fail(ErrorCode::InvalidMeasure, "duplicate outcome value");
}

Rational DiscreteMeasure::mean() const {
  Rational m = 0;
  for (std::size_t i = 0; i < values_.size(); ++i) m += probs_[i] * values_[i];
  return m;
}

Rational DiscreteMeasure::variance() const {
  const Rational m = mean();
  Rational v = 0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const Rational d = values_[i] - m;
    v += probs_[i] * d * d;
  }
  return v;
}

MeasureSet::MeasureSet(std::vector<DiscreteMeasure> laws) : laws_(std::move(laws)) {
  if (laws_.empty()) fail(ErrorCode::InvalidMeasure, "measure set is empty");
  const auto& ref = laws_.front().values();
  for (auto& law : laws_) {
    if (law.values() == ref) continue;
    // Same support listed in another order: reorder to the first law.
    if (law.size() != ref.size())
      fail(ErrorCode::SupportMismatch, "laws are defined on different outcome lists");
    std::vector<Rational> probs(ref.size());
    for (std::size_t j = 0; j < ref.size(); ++j) {
      const auto it = std::find(law.values().begin(), law.values().end(), ref[j]);
      if (it == law.values().end())
        fail(ErrorCode::SupportMismatch, "outcome " + to_string(ref[j]) + " missing from a law");
      probs[j] = law.probs()[static_cast<std::size_t>(it - law.values().begin())];
    }
    law = DiscreteMeasure(ref, std::move(probs));
  }
}

Rational MeasureSet::mean_lower() const {
  Rational best = laws_.front().mean();
  for (const auto& law : laws_) best = std::min(best, law.mean());
  return best;
}

Rational MeasureSet::mean_upper() const {
  Rational best = laws_.front().mean();
  for (const auto& law : laws_) best = std::max(best, law.mean());
  return best;
}

Rational MeasureSet::common_variance() const {
  Rational total = 0;
  for (const auto& law : laws_) total += law.variance();
  return total / static_cast<long>(laws_.size());
}

MeasureSet MeasureSet::shifted(const Rational& t) const {
  std::vector<DiscreteMeasure> out;
  out.reserve(laws_.size());
  for (const auto& law : laws_) {
    std::vector<Rational> values = law.values();
    for (auto& v : values) v += t;
    out.emplace_back(std::move(values), law.probs());
  }
  return MeasureSet(std::move(out));
}

AmbiguityInterval validate_measure_set(const MeasureSet& set, double tol_var) {
  for (const auto& law : set.laws()) {
    for (const auto& p : law.probs()) {
      if (p <= 0)
        fail(ErrorCode::InvalidMeasure,
             "laws must be mutually equivalent: every probability must be strictly positive");
    }
  }
  double lo = to_double(set.law(0).variance());
  double hi = lo;
  for (const auto& law : set.laws()) {
    const double v = to_double(law.variance());
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi - lo > tol_var) {
    std::ostringstream msg;
    msg << "per-law variances range over [" << lo << ", " << hi << "]";
    fail(ErrorCode::VarianceAmbiguous, msg.str());
  }
  const double sigma2 = to_double(set.common_variance());
  if (!(sigma2 > 0)) fail(ErrorCode::DegenerateSigma, "common variance is zero");
  return AmbiguityInterval{to_double(set.mean_lower()), to_double(set.mean_upper()),
                           std::sqrt(sigma2)};
}

MeasureSet coin_example(const Rational& p, const Rational& q) {
  if (!(q > 0 && q < p && p + q <= 1))
    fail(ErrorCode::BadParameters, "coin example needs 0 < q < p and p + q <= 1");
  const Rational rest = 1 - p - q;
  if (rest == 0) {
    // The zero outcome has no mass; drop it to keep the laws equivalent.
    const std::vector<Rational> values{Rational(1), Rational(-1)};
    return MeasureSet({DiscreteMeasure(values, {p, q}), DiscreteMeasure(values, {q, p})});
  }
  const std::vector<Rational> values{Rational(1), Rational(-1), Rational(0)};
  return MeasureSet({DiscreteMeasure(values, {p, q, rest}), DiscreteMeasure(values, {q, p, rest})});
}

MeasureSet parse_measure_set(std::string_view text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_info(in, tree);
  } catch (const pt::info_parser_error& e) {
    fail(ErrorCode::ConfigError, std::string("measure set: ") + e.what());
  }
  // Accept either top-level laws or laws nested in a `measures` section.
  const pt::ptree* root = &tree;
  if (const auto nested = tree.get_child_optional("measures")) root = &*nested;

  std::vector<DiscreteMeasure> laws;
  for (const auto& [key, node] : *root) {
    if (key != "law") fail(ErrorCode::ConfigError, "unexpected section '" + key + "'");
    std::vector<Rational> values, probs;
    for (const auto& [value, prob] : node) {
      values.push_back(parse_rational(value));
      probs.push_back(parse_rational(prob.data()));
    }
    laws.emplace_back(std::move(values), std::move(probs));
  }
  if (laws.empty()) fail(ErrorCode::ConfigError, "measure set lists no `law` sections");
  return MeasureSet(std::move(laws));
}

MeasureSet load_measure_set(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigError, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_measure_set(buffer.str());
}

}  // namespace rclt
