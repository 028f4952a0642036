#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace uplan {

using BigInt = mpz_class;
using Rational = mpq_class;

/// Accepts "p/q", integers and finite decimals ("0.375"), optionally signed.
Rational parse_rational(std::string_view text);

/// Canonical "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational& r);

struct RationalPoint {
  Rational x;
  Rational y;
  friend bool operator==(const RationalPoint&, const RationalPoint&) = default;
};

BigInt floor_of(const Rational& r);
BigInt ceil_of(const Rational& r);

/// 2^e as a rational, e may be negative.
Rational pow2(long e);

}  // namespace uplan
