#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace lpdo {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt numer(const Rational& q) { return boost::multiprecision::numerator(q); }
inline BigInt denom(const Rational& q) { return boost::multiprecision::denominator(q); }
inline bool is_integer(const Rational& q) { return denom(q) == 1; }

inline long to_long(const BigInt& v) { return v.convert_to<long>(); }

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline std::string to_string(const Rational& q) {
  std::string s = numer(q).str();
  if (!is_integer(q)) s += "/" + denom(q).str();
  return s;
}

/// base^exp for integer exp of either sign. base must be nonzero when exp < 0.
inline Rational rat_pow(const Rational& base, long exp) {
  if (exp == 0) return Rational(1);
  bool invert = exp < 0;
  unsigned long e = invert ? static_cast<unsigned long>(-exp) : static_cast<unsigned long>(exp);
  Rational acc(1), b = base;
  while (e) {
    if (e & 1) acc *= b;
    if (e >>= 1) b *= b;
  }
  if (invert) {
    if (acc == 0) throw std::domain_error("rat_pow: zero base with negative exponent");
    acc = Rational(1) / acc;
  }
  return acc;
}

/// Exact integer n-th root of v >= 0, if one exists.
inline std::optional<BigInt> int_nth_root(const BigInt& v, unsigned n) {
  if (v < 0 || n == 0) return std::nullopt;
  if (v == 0 || v == 1 || n == 1) return v;
  // Binary search over the root.
  BigInt lo = 1, hi = v;
  while (lo <= hi) {
    BigInt mid = (lo + hi) / 2;
    BigInt p = boost::multiprecision::pow(mid, n);
    if (p == v) return mid;
    if (p < v)
      lo = mid + 1;
    else
      hi = mid - 1;
  }
  return std::nullopt;
}

/// Exact rational n-th root. Negative q admits a real root only for odd n.
inline std::optional<Rational> rat_nth_root(const Rational& q, unsigned n) {
  if (n == 0) return std::nullopt;
  bool negative = q < 0;
  if (negative && n % 2 == 0) return std::nullopt;
  Rational a = negative ? Rational(-q) : q;
  auto rn = int_nth_root(numer(a), n);
  if (!rn) return std::nullopt;
  auto rd = int_nth_root(denom(a), n);
  if (!rd) return std::nullopt;
  Rational r(*rn, *rd);
  return negative ? Rational(-r) : r;
}

}  // namespace lpdo
