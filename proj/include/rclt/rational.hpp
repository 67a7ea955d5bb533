#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace rclt {

using Rational = mpq_class;
using BigInt = mpz_class;

/// Parses "3", "-0.25", "1e-3", "3/10" or "-7/4" into an exact rational.
/// Throws Error{ConfigError} on malformed input.
Rational parse_rational(std::string_view text);

/// Exact value of a finite double (every double is a dyadic rational).
Rational exact_from_double(double x);

double to_double(const Rational& r);

std::string to_string(const Rational& r);

/// n as int64 when it fits.
std::optional<std::int64_t> to_int64(const BigInt& n);

}  // namespace rclt
