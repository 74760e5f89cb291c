#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace pbimpact {

/// Exact rational number used for all money, price and metric arithmetic.
using Rational = mpq_class;

/// Parses a plain decimal literal ("12", "-0.25", "1000.50") without going
/// through binary floating point. A `p/q` fraction literal is also accepted so
/// that non-terminating rationals survive a serialize/parse round trip.
/// Throws Error(MalformedNumber).
Rational parse_decimal(std::string_view text);

/// True when the value has a finite decimal expansion (denominator 2^a 5^b).
bool is_terminating_decimal(const Rational& value);

/// Exact rendering: shortest decimal form when terminating, `p/q` otherwise.
std::string to_decimal_string(const Rational& value);

/// Always `num/den` of the canonical form.
std::string to_fraction_string(const Rational& value);

double to_double(const Rational& value);

/// Shortest round-trip rendering of a double, always with a decimal point or
/// exponent ("1.0", "0.25", "1e-07"). Empty string for NaN.
std::string format_double(double value);

/// Ordering for project and voter ids: all-digit ids compare numerically,
/// everything else lexicographically; digit ids sort before the rest.
struct IdLess {
  bool operator()(std::string_view a, std::string_view b) const;
};

}  // namespace pbimpact
