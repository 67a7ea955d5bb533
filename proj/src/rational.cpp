#include "rclt/rational.hpp"

#include <cctype>
#include <cmath>
#include <limits>

#include "rclt/error.hpp"

namespace rclt {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidMeasure: return "InvalidMeasure";
    case ErrorCode::SupportMismatch: return "SupportMismatch";
    case ErrorCode::VarianceAmbiguous: return "VarianceAmbiguous";
    case ErrorCode::DegenerateSigma: return "DegenerateSigma";
    case ErrorCode::BadParameters: return "BadParameters";
    case ErrorCode::HorizonExceeded: return "HorizonExceeded";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::BadInterval: return "BadInterval";
    case ErrorCode::BadTime: return "BadTime";
    case ErrorCode::UnstableGrid: return "UnstableGrid";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::NotMonotone: return "NotMonotone";
    case ErrorCode::StateExplosion: return "StateExplosion";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::EmptyTheta: return "EmptyTheta";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

int exit_code(ErrorCode code) {
  if (code == ErrorCode::ConfigError) return 2;
  return 10 + static_cast<int>(code);
}

namespace {

[[noreturn]] void bad_number(std::string_view text) {
  fail(ErrorCode::ConfigError, "not a number: '" + std::string(text) + "'");
}

Rational parse_decimal(std::string_view text) {
  std::size_t pos = 0;
  bool negative = false;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    negative = text[pos] == '-';
    ++pos;
  }
  std::string digits;
  long scale = 0;
  bool seen_digit = false;
  bool seen_point = false;
  for (; pos < text.size(); ++pos) {
    const char ch = text[pos];
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      digits.push_back(ch);
      seen_digit = true;
      if (seen_point) ++scale;
    } else if (ch == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) bad_number(text);
  long exponent = 0;
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    ++pos;
    const std::string rest(text.substr(pos));
    if (rest.empty()) bad_number(text);
    std::size_t used = 0;
    try {
      exponent = std::stol(rest, &used);
    } catch (const std::exception&) {
      bad_number(text);
    }
    if (used != rest.size()) bad_number(text);
    pos = text.size();
  }
  if (pos != text.size()) bad_number(text);
  if (exponent > 4000 || exponent < -4000) bad_number(text);

  BigInt numerator(digits, 10);
  const long shift = exponent - scale;
  BigInt power;
  mpz_ui_pow_ui(power.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
  Rational out = shift >= 0 ? Rational(numerator * power) : Rational(numerator, power);
  out.canonicalize();
  return negative ? Rational(-out) : out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  text = trim(text);
  if (text.empty()) bad_number(text);
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text);
  const Rational num = parse_decimal(trim(text.substr(0, slash)));
  const Rational den = parse_decimal(trim(text.substr(slash + 1)));
  if (den == 0) fail(ErrorCode::ConfigError, "zero denominator: '" + std::string(text) + "'");
  Rational out = num / den;
  out.canonicalize();
  return out;
}

Rational exact_from_double(double x) {
  if (!std::isfinite(x)) fail(ErrorCode::BadParameters, "non-finite value has no exact rational form");
  return Rational(x);
}

double to_double(const Rational& r) { return r.get_d(); }

std::string to_string(const Rational& r) { return r.get_str(); }

std::optional<std::int64_t> to_int64(const BigInt& n) {
  if (!mpz_fits_slong_p(n.get_mpz_t())) return std::nullopt;
  static_assert(sizeof(long) == 8, "LP64 expected");
  return static_cast<std::int64_t>(n.get_si());
}

}  // namespace rclt
