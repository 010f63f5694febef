#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "lpdo/rational.hpp"

namespace lpdo {

enum class Kind : std::uint8_t { Num, Const, Var, Param, Fun, Mul, Add };
enum class VarId : std::uint8_t { X, Y };
enum class ConstId : std::uint8_t { Sqrt2, Pi };
enum class FunId : std::uint8_t { Sin, Cos, Exp, Ln };

struct Node;

/// Immutable symbolic expression over the variables x, y with exact rational
/// constants, the named irrationals sqrt2 and pi, opaque named parameters,
/// and the elementary functions sin, cos, exp, ln.
///
/// Every Expr is canonical by construction: sums and products are flattened,
/// sorted by a fixed total node order, like terms/factors are combined, and
/// products distribute over sums. Structural equality therefore decides
/// syntactic identity of canonical forms.
class Expr {
 public:
  Expr() = default;  // the zero constant (held as a null node internally)
  const Node& node() const;
  Kind kind() const;

  static Expr from_node(std::shared_ptr<const Node> n) { return Expr(std::move(n)); }
  const std::shared_ptr<const Node>& ptr() const { return n_; }

 private:
  explicit Expr(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
  std::shared_ptr<const Node> n_;
};

/// A named parameter, opaque to the engine. dep_x/dep_y declare which
/// variables it may depend on (default: none, i.e. a true constant);
/// dx/dy are orders of opaque derivatives carried by this occurrence.
struct ParamInfo {
  std::string name;
  bool dep_x = false;
  bool dep_y = false;
  int dx = 0;
  int dy = 0;
};

struct Node {
  Kind kind = Kind::Num;
  Rational rat;  // Num value; Mul coefficient; Add constant term
  VarId var = VarId::X;
  ConstId cid = ConstId::Sqrt2;
  ParamInfo param;
  FunId fun = FunId::Sin;
  Expr arg;                                        // Fun argument
  std::vector<std::pair<Expr, Rational>> factors;  // Mul: base^exponent, sorted by base
  std::vector<std::pair<Rational, Expr>> terms;    // Add: coefficient * monic, sorted by monic
};

// Leaf builders.
Expr make_num(Rational q);
Expr make_int(long v);
Expr make_var(VarId v);
Expr var_x();
Expr var_y();
Expr make_const(ConstId c);
Expr sqrt2();
Expr pi();
Expr make_param(const std::string& name, bool dep_x = false, bool dep_y = false, int dx = 0,
                int dy = 0);
Expr make_param(const ParamInfo& p);

// Canonicalizing combinators.
Expr add(std::vector<Expr> parts);
Expr add(const Expr& a, const Expr& b);
Expr sub(const Expr& a, const Expr& b);
Expr neg(const Expr& a);
Expr mul(std::vector<Expr> parts);
Expr mul(const Expr& a, const Expr& b);
Expr div(const Expr& a, const Expr& b);
Expr pow(const Expr& base, const Rational& exponent);
Expr make_fun(FunId f, const Expr& arg);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr ln(const Expr& a);

inline Expr operator+(const Expr& a, const Expr& b) { return add(a, b); }
inline Expr operator-(const Expr& a, const Expr& b) { return sub(a, b); }
inline Expr operator-(const Expr& a) { return neg(a); }
inline Expr operator*(const Expr& a, const Expr& b) { return mul(a, b); }
inline Expr operator/(const Expr& a, const Expr& b) { return div(a, b); }

/// Fixed total order on canonical nodes; the sort key behind canonical form.
int cmp(const Expr& a, const Expr& b);
bool operator==(const Expr& a, const Expr& b);
inline bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }
inline bool operator<(const Expr& a, const Expr& b) { return cmp(a, b) < 0; }

bool is_literal_zero(const Expr& e);
bool is_literal_one(const Expr& e);
bool is_rational(const Expr& e);
/// Rational value of a Num node; throws otherwise.
Rational rational_value(const Expr& e);

bool contains_var(const Expr& e, VarId v);
bool contains_any_var(const Expr& e);
bool contains_param(const Expr& e, const std::string& name);
std::size_t tree_size(const Expr& e);

Expr diff(const Expr& e, VarId v);
Expr substitute_var(const Expr& e, VarId v, const Expr& replacement);
/// Substitutes a parameter by name; occurrences carrying opaque derivative
/// orders receive the correspondingly differentiated replacement.
Expr substitute_param(const Expr& e, const std::string& name, const Expr& replacement);

/// Rebuilds the expression bottom-up through the canonicalizing builders.
Expr recanonicalize(const Expr& e);

/// Eliminates even powers of sin via sin^2 u -> 1 - cos^2 u.
Expr trig_eliminate(const Expr& e);

/// Splits e, viewed as a polynomial in the (underived) parameter `name`,
/// into coefficients by power. Index 0 is the parameter-free part.
std::vector<Expr> collect_param_powers(const Expr& e, const std::string& name);

std::string to_string(const Expr& e);

}  // namespace lpdo
