#include "rclt/terminal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "rclt/error.hpp"

namespace rclt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double phi_std(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

TerminalFunction TerminalFunction::indicator(double a, double b) {
  if (!(a < b) || std::isinf(a) || std::isinf(b))
    fail(ErrorCode::BadInterval, "indicator needs finite a < b");
  return indicator(exact_from_double(a), exact_from_double(b));
}

TerminalFunction TerminalFunction::indicator(const Rational& a, const Rational& b) {
  if (!(a < b)) fail(ErrorCode::BadInterval, "indicator needs a < b");
  TerminalFunction f;
  f.kind_ = Kind::indicator;
  f.exact_a_ = a;
  f.exact_a_->canonicalize();
  f.exact_b_ = b;
  f.exact_b_->canonicalize();
  f.a_ = to_double(a);
  f.b_ = to_double(b);
  f.center_ = to_double(Rational((a + b) / 2));
  return f;
}

TerminalFunction TerminalFunction::left(double b) { return left(exact_from_double(b)); }

TerminalFunction TerminalFunction::left(const Rational& b) {
  TerminalFunction f;
  f.kind_ = Kind::left;
  f.exact_b_ = b;
  f.exact_b_->canonicalize();
  f.a_ = -kInf;
  f.b_ = to_double(b);
  return f;
}

TerminalFunction TerminalFunction::right(double a) { return right(exact_from_double(a)); }

TerminalFunction TerminalFunction::right(const Rational& a) {
  TerminalFunction f;
  f.kind_ = Kind::right;
  f.exact_a_ = a;
  f.exact_a_->canonicalize();
  f.a_ = to_double(a);
  f.b_ = kInf;
  return f;
}

TerminalFunction TerminalFunction::smoothed_indicator(double a, double b, double h) {
  if (!(a < b) || a == kInf || b == -kInf)
    fail(ErrorCode::BadInterval, "smoothed indicator needs a < b");
  if (!(h > 0.0)) fail(ErrorCode::BadParameters, "mollifier bandwidth must be positive");
  TerminalFunction f;
  f.kind_ = Kind::smoothed_indicator;
  f.a_ = a;
  f.b_ = b;
  f.h_ = h;
  if (std::isfinite(a) && std::isfinite(b)) f.center_ = 0.5 * (a + b);
  return f;
}

TerminalFunction TerminalFunction::tabulated(std::vector<double> xs, std::vector<double> ys) {
  if (xs.empty() || xs.size() != ys.size())
    fail(ErrorCode::BadParameters, "tabulated function needs matching, nonempty samples");
  if (!std::is_sorted(xs.begin(), xs.end()) ||
      std::adjacent_find(xs.begin(), xs.end()) != xs.end())
    fail(ErrorCode::BadParameters, "tabulated abscissae must be strictly increasing");
  for (double y : ys)
    if (!std::isfinite(y)) fail(ErrorCode::BadParameters, "terminal function must be bounded");
  TerminalFunction f;
  f.kind_ = Kind::tabulated;
  f.xs_ = std::move(xs);
  f.ys_ = std::move(ys);
  return f;
}

TerminalFunction TerminalFunction::constant(double k) { return tabulated({0.0}, {k}); }

double TerminalFunction::operator()(double x) const {
  x += offset_;
  double y = 0.0;
  switch (kind_) {
    case Kind::indicator: y = (x >= a_ && x <= b_) ? 1.0 : 0.0; break;
    case Kind::left: y = x <= b_ ? 1.0 : 0.0; break;
    case Kind::right: y = x >= a_ ? 1.0 : 0.0; break;
    case Kind::smoothed_indicator: {
      // int I_[a,b](x + h y) dPhi(y) = Phi((b - x)/h) - Phi((a - x)/h)
      const double upper = b_ == kInf ? 1.0 : phi_std((b_ - x) / h_);
      const double lower = a_ == -kInf ? 0.0 : phi_std((a_ - x) / h_);
      y = upper - lower;
      break;
    }
    case Kind::tabulated: {
      if (x <= xs_.front()) {
        y = ys_.front();
      } else if (x >= xs_.back()) {
        y = ys_.back();
      } else {
        const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        const auto j = static_cast<std::size_t>(it - xs_.begin());
        const double w = (x - xs_[j - 1]) / (xs_[j] - xs_[j - 1]);
        y = (1.0 - w) * ys_[j - 1] + w * ys_[j];
      }
      break;
    }
  }
  return complemented_ ? 1.0 - y : y;
}

double TerminalFunction::lower_bound() const {
  if (kind_ == Kind::tabulated) {
    const double lo = *std::min_element(ys_.begin(), ys_.end());
    const double hi = *std::max_element(ys_.begin(), ys_.end());
    return complemented_ ? 1.0 - hi : lo;
  }
  return 0.0;
}

double TerminalFunction::upper_bound() const {
  if (kind_ == Kind::tabulated) {
    const double lo = *std::min_element(ys_.begin(), ys_.end());
    const double hi = *std::max_element(ys_.begin(), ys_.end());
    return complemented_ ? 1.0 - lo : hi;
  }
  return 1.0;
}

TerminalFunction TerminalFunction::shifted(double t) const {
  TerminalFunction f = *this;
  if (f.kind_ == Kind::tabulated || f.kind_ == Kind::smoothed_indicator) {
    f.offset_ += t;
  } else {
    // Move the exact endpoints so lattice membership stays exact.
    const Rational dt = exact_from_double(t);
    if (f.exact_a_) f.exact_a_ = *f.exact_a_ - dt;
    if (f.exact_b_) f.exact_b_ = *f.exact_b_ - dt;
    if (f.exact_a_) f.a_ = to_double(*f.exact_a_);
    if (f.exact_b_) f.b_ = to_double(*f.exact_b_);
  }
  if (f.center_) f.center_ = *f.center_ - t;
  return f;
}

TerminalFunction TerminalFunction::complement() const {
  TerminalFunction f = *this;
  f.complemented_ = !f.complemented_;
  return f;
}

std::vector<double> TerminalFunction::sample(std::span<const double> xs) const {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = (*this)(xs[i]);
  return out;
}

std::string TerminalFunction::describe() const {
  std::ostringstream s;
  s.precision(17);
  if (complemented_) s << "1-";
  switch (kind_) {
    case Kind::indicator: s << "indicator[" << a_ << "," << b_ << "]"; break;
    case Kind::left: s << "left(-inf," << b_ << "]"; break;
    case Kind::right: s << "right[" << a_ << ",inf)"; break;
    case Kind::smoothed_indicator:
      s << "smoothed_indicator[" << a_ << "," << b_ << "],h=" << h_;
      break;
    case Kind::tabulated: s << "tabulated(" << xs_.size() << " points)"; break;
  }
  if (offset_ != 0.0) s << ",shift=" << offset_;
  return s.str();
}

}  // namespace rclt
