#pragma once

// Exact arithmetic used throughout: arbitrary-precision integers and
// rationals (boost::multiprecision), plus the handful of number-theoretic
// helpers the evaluator needs.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace dtv {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt numerator(const Rational& r) { return boost::multiprecision::numerator(r); }
inline BigInt denominator(const Rational& r) { return boost::multiprecision::denominator(r); }

inline bool is_integer(const Rational& r) { return denominator(r) == 1; }

inline bool is_nonneg_integer(const Rational& r) {
  return is_integer(r) && numerator(r) >= 0;
}

// Floor division, rounding toward negative infinity. cpp_int's operator/
// truncates toward zero, which is the wrong convention here.
inline BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b;
  if ((a % b) != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

// Modulus paired with floor_div: result has the sign of the divisor.
inline BigInt floor_mod(const BigInt& a, const BigInt& b) {
  return a - b * floor_div(a, b);
}

inline BigInt big_gcd(const BigInt& a, const BigInt& b) {
  return boost::multiprecision::gcd(a, b);
}

inline BigInt big_lcm(const BigInt& a, const BigInt& b) {
  return boost::multiprecision::lcm(a, b);
}

inline BigInt factorial(const BigInt& n) {
  if (n < 0) throw std::domain_error("factorial of negative");
  BigInt acc = 1;
  for (BigInt i = 2; i <= n; ++i) acc *= i;
  return acc;
}

inline BigInt big_pow(const BigInt& base, std::uint64_t e) {
  BigInt acc = 1, b = base;
  while (e != 0) {
    if (e & 1) acc *= b;
    b *= b;
    e >>= 1;
  }
  return acc;
}

inline Rational rat_pow(const Rational& base, std::uint64_t e) {
  Rational r(big_pow(numerator(base), e), big_pow(denominator(base), e));
  return r;
}

// Exact integer square root check.
inline std::optional<BigInt> exact_isqrt(const BigInt& n) {
  if (n < 0) return std::nullopt;
  BigInt r = boost::multiprecision::sqrt(n);
  if (r * r == n) return r;
  return std::nullopt;
}

// Square root of a rational if (and only if) it is again rational.
inline std::optional<Rational> exact_sqrt(const Rational& r) {
  if (r < 0) return std::nullopt;
  auto num = exact_isqrt(numerator(r));
  if (!num) return std::nullopt;
  auto den = exact_isqrt(denominator(r));
  if (!den) return std::nullopt;
  return Rational(*num, *den);
}

// Parses an optionally signed integer or decimal literal ("42", "-3.50")
// into an exact rational. Returns nullopt on anything else.
inline std::optional<Rational> parse_decimal(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::size_t i = 0;
  bool neg = false;
  if (text[i] == '+' || text[i] == '-') {
    neg = text[i] == '-';
    ++i;
  }
  if (i == text.size()) return std::nullopt;
  BigInt num = 0;
  BigInt den = 1;
  bool saw_digit = false, saw_point = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c >= '0' && c <= '9') {
      num = num * 10 + (c - '0');
      if (saw_point) den *= 10;
      saw_digit = true;
    } else if (c == '.' && !saw_point) {
      saw_point = true;
    } else {
      return std::nullopt;
    }
  }
  if (!saw_digit) return std::nullopt;
  if (neg) num = -num;
  return Rational(num, den);
}

// "n" for integers, "n/d" otherwise.
inline std::string rat_string(const Rational& r) {
  std::string s = numerator(r).str();
  if (!is_integer(r)) {
    s += "/";
    s += denominator(r).str();
  }
  return s;
}

// Decimal rendering for rationals whose denominator divides a power of ten
// (i.e. everything a decimal literal can produce). Falls back to n/d form.
inline std::string decimal_string(const Rational& r) {
  if (is_integer(r)) return numerator(r).str();
  BigInt den = denominator(r);
  unsigned twos = 0, fives = 0;
  BigInt d = den;
  while (d % 2 == 0) { d /= 2; ++twos; }
  while (d % 5 == 0) { d /= 5; ++fives; }
  if (d != 1) return rat_string(r);
  unsigned k = twos > fives ? twos : fives;
  BigInt scaled = numerator(r) * big_pow(10, k) / den;
  bool neg = scaled < 0;
  std::string digits = (neg ? -scaled : scaled).str();
  if (digits.size() <= k) digits.insert(0, k + 1 - digits.size(), '0');
  std::string out = digits.substr(0, digits.size() - k) + "." + digits.substr(digits.size() - k);
  while (out.back() == '0') out.pop_back();
  if (out.back() == '.') out.pop_back();
  return neg ? "-" + out : out;
}

}  // namespace dtv
