#include "uplan/rational.hpp"

#include <cctype>

#include "uplan/errors.hpp"

namespace uplan {

Rational parse_rational(std::string_view text) {
  auto fail = [&] {
    return ParseError(ParseError::Kind::kBadValue, "not a rational number: '" + std::string(text) + "'");
  };
  if (text.empty()) throw fail();
  std::string s(text);
  if (const auto slash = s.find('/'); slash != std::string::npos) {
    BigInt num, den;
    if (num.set_str(s.substr(0, slash), 10) != 0 || den.set_str(s.substr(slash + 1), 10) != 0) throw fail();
    if (den == 0) throw fail();
    Rational r(num, den);
    r.canonicalize();
    return r;
  }
  bool negative = false;
  std::size_t i = 0;
  if (s[0] == '-' || s[0] == '+') {
    negative = s[0] == '-';
    i = 1;
  }
  std::string digits;
  std::size_t fraction_digits = 0;
  bool seen_point = false;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '.' && !seen_point) {
      seen_point = true;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      if (seen_point) ++fraction_digits;
    } else {
      throw fail();
    }
  }
  if (digits.empty()) throw fail();
  BigInt num(digits, 10);
  BigInt den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, fraction_digits);
  Rational r(negative ? BigInt(-num) : num, den);
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

BigInt floor_of(const Rational& r) {
  BigInt q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

BigInt ceil_of(const Rational& r) {
  BigInt q;
  mpz_cdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

Rational pow2(long e) {
  BigInt p = 1;
  if (e >= 0) {
    p <<= static_cast<mp_bitcnt_t>(e);
    return Rational(p);
  }
  p <<= static_cast<mp_bitcnt_t>(-e);
  return Rational(BigInt(1), p);
}

}  // namespace uplan
