#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace cbpv {

using BigInt = mpz_class;
using Rational = mpq_class;

/// "p/q" in lowest terms, or just "p" when the denominator is 1.
std::string to_fraction_string(const Rational& q);

/// Fixed-point rendering, rounded half away from zero.
std::string to_decimal_string(const Rational& q, int places = 6);

/// Accepts "p", "p/q" and decimal notation such as "0.25". Throws
/// std::invalid_argument on malformed input or a zero denominator.
Rational parse_rational(std::string_view text);

BigInt parse_integer(std::string_view text);

inline Rational half() { return Rational(1, 2); }

}  // namespace cbpv
