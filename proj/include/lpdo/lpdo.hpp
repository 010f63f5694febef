#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lpdo/expr.hpp"

namespace lpdo {

struct ZeroOperatorError : std::domain_error {
  ZeroOperatorError() : std::domain_error("operation undefined for the zero operator") {}
};

/// A bivariate linear partial differential operator
///   sum over j+k <= n of a_jk * Dx^j * Dy^k
/// stored as a sparse map from (j, k) to its canonical coefficient.
/// Canonically-zero coefficients are never stored; the zero operator is the
/// empty map and has no order.
class Lpdo {
 public:
  using Key = std::pair<int, int>;

  Lpdo() = default;

  static Lpdo identity() { return from_coeff(0, 0, make_int(1)); }
  static Lpdo dx() { return from_coeff(1, 0, make_int(1)); }
  static Lpdo dy() { return from_coeff(0, 1, make_int(1)); }
  static Lpdo from_coeff(int j, int k, const Expr& c);
  static Lpdo from_expr(const Expr& c) { return from_coeff(0, 0, c); }

  void set(int j, int k, const Expr& c);
  Expr coeff(int j, int k) const;
  const std::map<Key, Expr>& coeffs() const { return coeffs_; }

  bool is_zero_operator() const { return coeffs_.empty(); }
  /// Throws ZeroOperatorError on the zero operator.
  int order() const;

  friend bool operator==(const Lpdo& a, const Lpdo& b) { return a.coeffs_ == b.coeffs_; }
  friend bool operator!=(const Lpdo& a, const Lpdo& b) { return !(a == b); }

 private:
  std::map<Key, Expr> coeffs_;
};

Lpdo add(const Lpdo& a, const Lpdo& b);
Lpdo sub(const Lpdo& a, const Lpdo& b);
Lpdo neg(const Lpdo& a);
/// Left multiplication by a function: (f*A)u = f*(Au).
Lpdo scale(const Expr& f, const Lpdo& a);

inline Lpdo operator+(const Lpdo& a, const Lpdo& b) { return add(a, b); }
inline Lpdo operator-(const Lpdo& a, const Lpdo& b) { return sub(a, b); }
inline Lpdo operator-(const Lpdo& a) { return neg(a); }

/// A applied to a function u: sum a_jk * d^j/dx^j d^k/dy^k u.
Expr apply(const Lpdo& a, const Expr& u);

/// Operator composition: apply(compose(A,B), u) == apply(A, apply(B, u)).
Lpdo compose(const Lpdo& a, const Lpdo& b);
inline Lpdo operator*(const Lpdo& a, const Lpdo& b) { return compose(a, b); }

/// Formal adjoint: A^t u = sum (-1)^(j+k) d^j d^k (a_jk * u).
Lpdo transpose(const Lpdo& a);

/// Gauge conjugation e^(-phi) A e^(phi): substitutes Dx -> Dx + phi_x,
/// Dy -> Dy + phi_y and re-expands. Preserves order and principal symbol.
Lpdo gauge_conjugate(const Lpdo& a, const Expr& phi);

/// Homogeneous binary form of degree d; coefficient(j) multiplies s^j t^(d-j).
class BinaryForm {
 public:
  explicit BinaryForm(int degree) : coeffs_(static_cast<size_t>(degree) + 1) {}
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const Expr& coefficient(int j) const { return coeffs_.at(static_cast<size_t>(j)); }
  void set_coefficient(int j, const Expr& c) { coeffs_.at(static_cast<size_t>(j)) = c; }
  /// Value at (s, t) as an expression.
  Expr at(const Expr& s, const Expr& t) const;

 private:
  std::vector<Expr> coeffs_;
};

/// Top-grade form of A: sum over j+k = order of a_jk s^j t^k.
BinaryForm principal_symbol(const Lpdo& a);

/// Deterministic text form: grades descending, Dx-power descending within a
/// grade; round-trips through parse_operator.
std::string to_string(const Lpdo& a);

}  // namespace lpdo
