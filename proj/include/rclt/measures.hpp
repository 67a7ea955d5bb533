#pragma once

#include <cstddef>
#include <filesystem>
#include <string_view>
#include <vector>

#include "rclt/rational.hpp"

namespace rclt {

/// Mean interval [mu_lower, mu_upper] and the common standard deviation of
/// a measure set. These three numbers drive every limit formula.
struct AmbiguityInterval {
  double mu_lower = 0.0;
  double mu_upper = 0.0;
  double sigma = 1.0;

  double kappa() const { return 0.5 * (mu_upper - mu_lower); }
  double center() const { return 0.5 * (mu_upper + mu_lower); }
};

/// A law on finitely many real outcomes, held in exact arithmetic.
class DiscreteMeasure {
 public:
  DiscreteMeasure(std::vector<Rational> values, std::vector<Rational> probs);

  const std::vector<Rational>& values() const { return values_; }
  const std::vector<Rational>& probs() const { return probs_; }
  std::size_t size() const { return values_.size(); }

  Rational mean() const;
  Rational variance() const;

 private:
  std::vector<Rational> values_;
  std::vector<Rational> probs_;
};

/// The one-step set L: finitely many mutually equivalent laws on a common
/// outcome list. Immutable once built.
class MeasureSet {
 public:
  explicit MeasureSet(std::vector<DiscreteMeasure> laws);

  const std::vector<DiscreteMeasure>& laws() const { return laws_; }
  const DiscreteMeasure& law(std::size_t i) const { return laws_[i]; }
  std::size_t size() const { return laws_.size(); }
  std::size_t outcomes() const { return laws_.front().size(); }
  const std::vector<Rational>& values() const { return laws_.front().values(); }

  Rational mean(std::size_t i) const { return laws_[i].mean(); }
  Rational mean_lower() const;
  Rational mean_upper() const;
  /// Average of the per-law variances; equals every law's variance for a
  /// validated set.
  Rational common_variance() const;

  /// Same laws with every outcome moved by t.
  MeasureSet shifted(const Rational& t) const;

 private:
  std::vector<DiscreteMeasure> laws_;
};

inline constexpr double kDefaultVarianceTolerance = 1e-9;

/// Checks the standing assumptions (common support, strictly positive
/// probabilities, one variance for all laws) and returns the mean interval.
AmbiguityInterval validate_measure_set(const MeasureSet& set,
                                       double tol_var = kDefaultVarianceTolerance);

/// Three-outcome coin: values (1, -1, 0) under the favourable law
/// (p, q, 1-p-q) or the unfavourable law (q, p, 1-p-q). When p + q = 1 the
/// outcome 0 is omitted.
MeasureSet coin_example(const Rational& p, const Rational& q);

/// Parses a measure-set config. Each top-level `law { value prob ... }`
/// section lists outcome/probability pairs; numbers may be decimals or a/b.
MeasureSet parse_measure_set(std::string_view text);
MeasureSet load_measure_set(const std::filesystem::path& path);

}  // namespace rclt
