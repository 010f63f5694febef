#include "lpdo/expr.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <stdexcept>

namespace lpdo {

namespace {

std::shared_ptr<const Node> share(Node&& n) { return std::make_shared<const Node>(std::move(n)); }

const std::shared_ptr<const Node>& zero_node() {
  static const std::shared_ptr<const Node> z = [] {
    Node n;
    n.kind = Kind::Num;
    n.rat = 0;
    return share(std::move(n));
  }();
  return z;
}

int cmp_rat(const Rational& a, const Rational& b) { return a == b ? 0 : (a < b ? -1 : 1); }

int kind_rank(Kind k) {
  switch (k) {
    case Kind::Num: return 0;
    case Kind::Const: return 1;
    case Kind::Var: return 2;
    case Kind::Param: return 3;
    case Kind::Fun: return 4;
    case Kind::Mul: return 5;
    case Kind::Add: return 6;
  }
  return 7;
}

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return cmp(a, b) < 0; }
};

bool is_int(const Rational& q) { return denom(q) == 1; }

long exp_to_long(const Rational& q) {
  BigInt n = numer(q);
  if (n > 1000000 || n < -1000000) throw std::domain_error("exponent too large");
  return to_long(n);
}

// ---------------------------------------------------------------------------
// Product assembly
// ---------------------------------------------------------------------------

// q^e with rational e. Exact parts are folded into `coeff`; the non-foldable
// residue is reported as (q', e') with 0 < e' < 1 and q' free of perfect
// denom(e')-th power divisors (up to the trial prime bound).
void fold_num_power(Rational q, Rational e, Rational& coeff,
                    std::map<Expr, Rational, ExprLess>& residue);

struct MulBuilder {
  Rational coeff = 1;
  std::map<Expr, Rational, ExprLess> bases;

  void push(const Expr& part, const Rational& exponent);
  Expr build();
};

struct AddBuilder {
  Rational constant = 0;
  std::map<Expr, Rational, ExprLess> terms;

  void push(const Expr& part, const Rational& scale = Rational(1));
  Expr build();
};

// coeff * product(factors); factors sorted and already canonical.
Expr assemble_mul(const Rational& coeff, std::vector<std::pair<Expr, Rational>> factors) {
  if (coeff == 0) return Expr();
  if (factors.empty()) return make_num(coeff);
  if (coeff == 1 && factors.size() == 1 && factors[0].second == 1) return factors[0].first;
  Node n;
  n.kind = Kind::Mul;
  n.rat = coeff;
  n.factors = std::move(factors);
  return Expr::from_node(share(std::move(n)));
}

// coeff * monic, where monic is a canonical non-Add, non-Num expression.
Expr assemble_term(const Rational& coeff, const Expr& monic) {
  if (coeff == 0) return Expr();
  if (coeff == 1) return monic;
  if (monic.kind() == Kind::Mul) {
    const Node& m = monic.node();
    return assemble_mul(coeff * m.rat, m.factors);
  }
  return assemble_mul(coeff, {{monic, Rational(1)}});
}

void split_term(const Expr& e, Rational& coeff, Expr& monic) {
  if (e.kind() == Kind::Mul) {
    const Node& n = e.node();
    coeff = n.rat;
    monic = assemble_mul(Rational(1), n.factors);
  } else {
    coeff = 1;
    monic = e;
  }
}

void fold_num_power(Rational q, Rational e, Rational& coeff,
                    std::map<Expr, Rational, ExprLess>& residue) {
  if (q == 1 || e == 0) return;
  if (q == 0) {
    if (e < 0) throw std::domain_error("zero base with negative exponent");
    coeff = 0;
    return;
  }
  if (is_int(e)) {
    coeff *= rat_pow(q, exp_to_long(e));
    return;
  }
  unsigned b = static_cast<unsigned>(to_long(denom(e)));
  if (q < 0) {
    if (b % 2 == 0) {
      // No real value; keep the power intact (evaluates to NaN).
      residue[make_num(q)] += e;
      return;
    }
    if (numer(e) % 2 != 0) coeff = -coeff;
    q = -q;
  }
  // Split off the integer part of the exponent, then extract exact b-th roots.
  BigInt a = numer(e);
  BigInt i = a / b;  // floor for a of either sign comes next
  if (a < 0 && i * b != a) i -= 1;
  if (i != 0) coeff *= rat_pow(q, to_long(i));
  Rational f = e - Rational(i);
  if (f == 0) return;
  if (auto root = rat_nth_root(q, b)) {
    coeff *= rat_pow(*root, exp_to_long(f * b));
    return;
  }
  // Partial extraction by trial division: pull out perfect b-th power divisors.
  static const int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
                                43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};
  auto extract = [&](BigInt v, BigInt& outer) {
    outer = 1;
    for (int p : kPrimes) {
      unsigned m = 0;
      while (v % p == 0) {
        v /= p;
        ++m;
      }
      if (m == 0) continue;
      unsigned k = m / b, r = m % b;
      if (k) outer *= boost::multiprecision::pow(BigInt(p), k);
      if (r) v *= boost::multiprecision::pow(BigInt(p), r);
    }
    return v;
  };
  BigInt on, od;
  BigInt rn = extract(numer(q), on);
  BigInt rd = extract(denom(q), od);
  Rational outer(on, od);
  if (outer != 1) coeff *= rat_pow(outer, exp_to_long(f * b));
  Rational rest(rn, rd);
  if (rest != 1) residue[make_num(rest)] += f;
}

void MulBuilder::push(const Expr& part, const Rational& exponent) {
  if (exponent == 0) return;
  switch (part.kind()) {
    case Kind::Num:
      fold_num_power(part.node().rat, exponent, coeff, bases);
      return;
    case Kind::Mul: {
      const Node& n = part.node();
      fold_num_power(n.rat, exponent, coeff, bases);
      for (const auto& [b, e] : n.factors) push(b, e * exponent);
      return;
    }
    default:
      bases[part] += exponent;
      return;
  }
}

Expr MulBuilder::build() {
  if (coeff == 0) return Expr();
  // Re-fold numeric bases until stable; exponent merging may have produced
  // integer or extractable powers.
  for (bool changed = true; changed;) {
    changed = false;
    for (auto it = bases.begin(); it != bases.end(); ++it) {
      if (it->first.kind() != Kind::Num || it->second == 0) continue;
      Expr base = it->first;
      Rational e = it->second;
      const Rational& q = base.node().rat;
      if (is_int(e) || q > 0) {
        std::map<Expr, Rational, ExprLess> folded;
        Rational c = 1;
        fold_num_power(q, e, c, folded);
        bool trivial = c == 1 && folded.size() == 1 && folded.begin()->first == base &&
                       folded.begin()->second == e;
        if (!trivial) {
          coeff *= c;
          bases.erase(it);
          for (const auto& [b, fe] : folded) bases[b] += fe;
          changed = true;
          break;
        }
      }
    }
  }
  if (coeff == 0) return Expr();

  std::vector<std::pair<Expr, Rational>> atomic;
  std::vector<std::pair<Expr, long>> expand;
  for (const auto& [b, e] : bases) {
    if (e == 0) continue;
    if (b.kind() == Kind::Add && is_int(e) && e > 0)
      expand.emplace_back(b, exp_to_long(e));
    else
      atomic.emplace_back(b, e);
  }
  Expr atom_part = assemble_mul(coeff, std::move(atomic));
  if (expand.empty()) return atom_part;

  // Distribute over sums: multiply out each positive integer power of a sum.
  std::vector<Expr> poly{atom_part};
  for (const auto& [sum, k] : expand) {
    const Node& s = sum.node();
    std::vector<Expr> addends;
    addends.reserve(s.terms.size() + 1);
    for (const auto& [c, m] : s.terms) addends.push_back(assemble_term(c, m));
    if (s.rat != 0) addends.push_back(make_num(s.rat));
    for (long rep = 0; rep < k; ++rep) {
      std::vector<Expr> next;
      next.reserve(poly.size() * addends.size());
      for (const Expr& t : poly)
        for (const Expr& a : addends) next.push_back(mul(t, a));
      poly = std::move(next);
    }
  }
  return add(std::move(poly));
}

void AddBuilder::push(const Expr& part, const Rational& scale) {
  if (scale == 0) return;
  switch (part.kind()) {
    case Kind::Num:
      constant += part.node().rat * scale;
      return;
    case Kind::Add: {
      const Node& n = part.node();
      constant += n.rat * scale;
      for (const auto& [c, m] : n.terms) terms[m] += c * scale;
      return;
    }
    default: {
      Rational c;
      Expr monic;
      split_term(part, c, monic);
      terms[monic] += c * scale;
      return;
    }
  }
}

Expr AddBuilder::build() {
  std::vector<std::pair<Rational, Expr>> kept;
  kept.reserve(terms.size());
  for (const auto& [m, c] : terms)
    if (c != 0) kept.emplace_back(c, m);
  if (kept.empty()) return make_num(constant);
  if (constant == 0 && kept.size() == 1) return assemble_term(kept[0].first, kept[0].second);
  Node n;
  n.kind = Kind::Add;
  n.rat = constant;
  n.terms = std::move(kept);
  return Expr::from_node(share(std::move(n)));
}

}  // namespace

// ---------------------------------------------------------------------------
// Public builders
// ---------------------------------------------------------------------------

const Node& Expr::node() const { return n_ ? *n_ : *zero_node(); }
Kind Expr::kind() const { return n_ ? n_->kind : Kind::Num; }

Expr make_num(Rational q) {
  Node n;
  n.kind = Kind::Num;
  n.rat = std::move(q);
  return Expr::from_node(share(std::move(n)));
}

Expr make_int(long v) { return make_num(Rational(v)); }

Expr make_var(VarId v) {
  Node n;
  n.kind = Kind::Var;
  n.var = v;
  return Expr::from_node(share(std::move(n)));
}

Expr var_x() { return make_var(VarId::X); }
Expr var_y() { return make_var(VarId::Y); }

Expr make_const(ConstId c) {
  if (c == ConstId::Sqrt2) return pow(make_int(2), Rational(1, 2));
  Node n;
  n.kind = Kind::Const;
  n.cid = c;
  return Expr::from_node(share(std::move(n)));
}

Expr sqrt2() { return make_const(ConstId::Sqrt2); }
Expr pi() { return make_const(ConstId::Pi); }

Expr make_param(const std::string& name, bool dep_x, bool dep_y, int dx, int dy) {
  ParamInfo p;
  p.name = name;
  p.dep_x = dep_x;
  p.dep_y = dep_y;
  p.dx = dx;
  p.dy = dy;
  return make_param(p);
}

Expr make_param(const ParamInfo& p) {
  Node n;
  n.kind = Kind::Param;
  n.param = p;
  return Expr::from_node(share(std::move(n)));
}

Expr add(std::vector<Expr> parts) {
  AddBuilder b;
  for (const Expr& p : parts) b.push(p);
  return b.build();
}

Expr add(const Expr& a, const Expr& b) { return add(std::vector<Expr>{a, b}); }
Expr sub(const Expr& a, const Expr& b) { return add({a, neg(b)}); }

Expr neg(const Expr& a) {
  AddBuilder b;
  b.push(a, Rational(-1));
  return b.build();
}

Expr mul(std::vector<Expr> parts) {
  MulBuilder b;
  for (const Expr& p : parts) b.push(p, Rational(1));
  return b.build();
}

Expr mul(const Expr& a, const Expr& b) { return mul(std::vector<Expr>{a, b}); }

Expr div(const Expr& a, const Expr& b) {
  if (is_literal_zero(b)) throw std::domain_error("division by the zero expression");
  return mul(a, pow(b, Rational(-1)));
}

Expr pow(const Expr& base, const Rational& exponent) {
  if (exponent == 0) return make_int(1);
  if (exponent == 1) return base;
  MulBuilder b;
  b.push(base, exponent);
  return b.build();
}

Expr make_fun(FunId f, const Expr& arg) {
  if (is_literal_zero(arg)) {
    switch (f) {
      case FunId::Sin: return Expr();
      case FunId::Cos: return make_int(1);
      case FunId::Exp: return make_int(1);
      case FunId::Ln: throw std::domain_error("ln(0) is undefined");
    }
  }
  if (f == FunId::Ln && is_literal_one(arg)) return Expr();
  Node n;
  n.kind = Kind::Fun;
  n.fun = f;
  n.arg = arg;
  return Expr::from_node(share(std::move(n)));
}

Expr sin(const Expr& a) { return make_fun(FunId::Sin, a); }
Expr cos(const Expr& a) { return make_fun(FunId::Cos, a); }
Expr exp(const Expr& a) { return make_fun(FunId::Exp, a); }
Expr ln(const Expr& a) { return make_fun(FunId::Ln, a); }

// ---------------------------------------------------------------------------
// Ordering and structural queries
// ---------------------------------------------------------------------------

int cmp(const Expr& a, const Expr& b) {
  if (a.ptr() == b.ptr()) return 0;
  const Node& na = a.node();
  const Node& nb = b.node();
  if (int d = kind_rank(na.kind) - kind_rank(nb.kind)) return d < 0 ? -1 : 1;
  switch (na.kind) {
    case Kind::Num: return cmp_rat(na.rat, nb.rat);
    case Kind::Const: return static_cast<int>(na.cid) - static_cast<int>(nb.cid);
    case Kind::Var: return static_cast<int>(na.var) - static_cast<int>(nb.var);
    case Kind::Param: {
      if (int d = na.param.name.compare(nb.param.name)) return d < 0 ? -1 : 1;
      if (na.param.dx != nb.param.dx) return na.param.dx < nb.param.dx ? -1 : 1;
      if (na.param.dy != nb.param.dy) return na.param.dy < nb.param.dy ? -1 : 1;
      if (na.param.dep_x != nb.param.dep_x) return na.param.dep_x ? 1 : -1;
      if (na.param.dep_y != nb.param.dep_y) return na.param.dep_y ? 1 : -1;
      return 0;
    }
    case Kind::Fun: {
      if (int d = static_cast<int>(na.fun) - static_cast<int>(nb.fun)) return d;
      return cmp(na.arg, nb.arg);
    }
    case Kind::Mul: {
      size_t n = std::min(na.factors.size(), nb.factors.size());
      for (size_t i = 0; i < n; ++i) {
        if (int d = cmp(na.factors[i].first, nb.factors[i].first)) return d;
        if (int d = cmp_rat(na.factors[i].second, nb.factors[i].second)) return d;
      }
      if (na.factors.size() != nb.factors.size())
        return na.factors.size() < nb.factors.size() ? -1 : 1;
      return cmp_rat(na.rat, nb.rat);
    }
    case Kind::Add: {
      size_t n = std::min(na.terms.size(), nb.terms.size());
      for (size_t i = 0; i < n; ++i) {
        if (int d = cmp(na.terms[i].second, nb.terms[i].second)) return d;
        if (int d = cmp_rat(na.terms[i].first, nb.terms[i].first)) return d;
      }
      if (na.terms.size() != nb.terms.size()) return na.terms.size() < nb.terms.size() ? -1 : 1;
      return cmp_rat(na.rat, nb.rat);
    }
  }
  return 0;
}

bool operator==(const Expr& a, const Expr& b) { return cmp(a, b) == 0; }

bool is_literal_zero(const Expr& e) { return e.kind() == Kind::Num && e.node().rat == 0; }
bool is_literal_one(const Expr& e) { return e.kind() == Kind::Num && e.node().rat == 1; }
bool is_rational(const Expr& e) { return e.kind() == Kind::Num; }

Rational rational_value(const Expr& e) {
  if (e.kind() != Kind::Num) throw std::domain_error("expression is not a rational constant");
  return e.node().rat;
}

bool contains_var(const Expr& e, VarId v) {
  const Node& n = e.node();
  switch (n.kind) {
    case Kind::Num:
    case Kind::Const:
    case Kind::Param: return false;
    case Kind::Var: return n.var == v;
    case Kind::Fun: return contains_var(n.arg, v);
    case Kind::Mul:
      return std::any_of(n.factors.begin(), n.factors.end(),
                         [&](const auto& f) { return contains_var(f.first, v); });
    case Kind::Add:
      return std::any_of(n.terms.begin(), n.terms.end(),
                         [&](const auto& t) { return contains_var(t.second, v); });
  }
  return false;
}

bool contains_any_var(const Expr& e) {
  return contains_var(e, VarId::X) || contains_var(e, VarId::Y);
}

bool contains_param(const Expr& e, const std::string& name) {
  const Node& n = e.node();
  switch (n.kind) {
    case Kind::Num:
    case Kind::Const:
    case Kind::Var: return false;
    case Kind::Param: return n.param.name == name;
    case Kind::Fun: return contains_param(n.arg, name);
    case Kind::Mul:
      return std::any_of(n.factors.begin(), n.factors.end(),
                         [&](const auto& f) { return contains_param(f.first, name); });
    case Kind::Add:
      return std::any_of(n.terms.begin(), n.terms.end(),
                         [&](const auto& t) { return contains_param(t.second, name); });
  }
  return false;
}

std::size_t tree_size(const Expr& e) {
  const Node& n = e.node();
  std::size_t s = 1;
  switch (n.kind) {
    case Kind::Fun: s += tree_size(n.arg); break;
    case Kind::Mul:
      for (const auto& f : n.factors) s += tree_size(f.first);
      break;
    case Kind::Add:
      for (const auto& t : n.terms) s += tree_size(t.second);
      break;
    default: break;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Calculus and rewriting
// ---------------------------------------------------------------------------

Expr diff(const Expr& e, VarId v) {
  const Node& n = e.node();
  switch (n.kind) {
    case Kind::Num:
    case Kind::Const: return Expr();
    case Kind::Var: return n.var == v ? make_int(1) : Expr();
    case Kind::Param: {
      bool dep = v == VarId::X ? n.param.dep_x : n.param.dep_y;
      if (!dep) return Expr();
      ParamInfo p = n.param;
      (v == VarId::X ? p.dx : p.dy) += 1;
      return make_param(p);
    }
    case Kind::Fun: {
      Expr da = diff(n.arg, v);
      if (is_literal_zero(da)) return Expr();
      Expr outer;
      switch (n.fun) {
        case FunId::Sin: outer = cos(n.arg); break;
        case FunId::Cos: outer = neg(sin(n.arg)); break;
        case FunId::Exp: outer = e; break;
        case FunId::Ln: outer = pow(n.arg, Rational(-1)); break;
      }
      return mul(outer, da);
    }
    case Kind::Add: {
      AddBuilder b;
      for (const auto& [c, m] : n.terms) b.push(diff(m, v), c);
      return b.build();
    }
    case Kind::Mul: {
      AddBuilder b;
      for (size_t k = 0; k < n.factors.size(); ++k) {
        const auto& [bk, ek] = n.factors[k];
        Expr dbk = diff(bk, v);
        if (is_literal_zero(dbk)) continue;
        std::vector<Expr> parts;
        parts.reserve(n.factors.size() + 3);
        parts.push_back(make_num(n.rat * ek));
        parts.push_back(pow(bk, ek - 1));
        parts.push_back(dbk);
        for (size_t i = 0; i < n.factors.size(); ++i)
          if (i != k) parts.push_back(pow(n.factors[i].first, n.factors[i].second));
        b.push(mul(std::move(parts)));
      }
      return b.build();
    }
  }
  return Expr();
}

namespace {

template <typename LeafFn>
Expr transform(const Expr& e, const LeafFn& leaf) {
  const Node& n = e.node();
  switch (n.kind) {
    case Kind::Num: return e;
    case Kind::Const:
    case Kind::Var:
    case Kind::Param: return leaf(e);
    case Kind::Fun: return make_fun(n.fun, transform(n.arg, leaf));
    case Kind::Mul: {
      MulBuilder b;
      b.push(make_num(n.rat), Rational(1));
      for (const auto& [base, ex] : n.factors) b.push(transform(base, leaf), ex);
      return b.build();
    }
    case Kind::Add: {
      AddBuilder b;
      b.push(make_num(n.rat));
      for (const auto& [c, m] : n.terms) b.push(transform(m, leaf), c);
      return b.build();
    }
  }
  return e;
}

}  // namespace

Expr substitute_var(const Expr& e, VarId v, const Expr& replacement) {
  return transform(e, [&](const Expr& leaf) {
    if (leaf.kind() == Kind::Var && leaf.node().var == v) return replacement;
    return leaf;
  });
}

Expr substitute_param(const Expr& e, const std::string& name, const Expr& replacement) {
  return transform(e, [&](const Expr& leaf) {
    if (leaf.kind() != Kind::Param || leaf.node().param.name != name) return leaf;
    const ParamInfo& p = leaf.node().param;
    Expr r = replacement;
    for (int i = 0; i < p.dx; ++i) r = diff(r, VarId::X);
    for (int i = 0; i < p.dy; ++i) r = diff(r, VarId::Y);
    return r;
  });
}

Expr recanonicalize(const Expr& e) {
  return transform(e, [](const Expr& leaf) { return leaf; });
}

Expr trig_eliminate(const Expr& e) {
  const Node& n = e.node();
  switch (n.kind) {
    case Kind::Num:
    case Kind::Const:
    case Kind::Var:
    case Kind::Param: return e;
    case Kind::Fun: return make_fun(n.fun, trig_eliminate(n.arg));
    case Kind::Add: {
      AddBuilder b;
      b.push(make_num(n.rat));
      for (const auto& [c, m] : n.terms) b.push(trig_eliminate(m), c);
      return b.build();
    }
    case Kind::Mul: {
      std::vector<Expr> parts;
      parts.push_back(make_num(n.rat));
      for (const auto& [base, ex] : n.factors) {
        Expr b = trig_eliminate(base);
        if (b.kind() == Kind::Fun && b.node().fun == FunId::Sin && is_int(ex) && ex >= 2) {
          long k = exp_to_long(ex);
          Expr one_minus_cos2 = sub(make_int(1), pow(cos(b.node().arg), Rational(2)));
          parts.push_back(pow(one_minus_cos2, Rational(k / 2)));
          if (k % 2) parts.push_back(b);
        } else {
          parts.push_back(pow(b, ex));
        }
      }
      return mul(std::move(parts));
    }
  }
  return e;
}

std::vector<Expr> collect_param_powers(const Expr& e, const std::string& name) {
  auto param_degree = [&](const Expr& monic, Expr& rest) -> long {
    if (monic.kind() == Kind::Param) {
      const ParamInfo& p = monic.node().param;
      if (p.name == name && p.dx == 0 && p.dy == 0) {
        rest = make_int(1);
        return 1;
      }
      return 0;
    }
    if (monic.kind() != Kind::Mul) return 0;
    const Node& m = monic.node();
    for (size_t i = 0; i < m.factors.size(); ++i) {
      const auto& [b, ex] = m.factors[i];
      if (b.kind() != Kind::Param) continue;
      const ParamInfo& p = b.node().param;
      if (p.name != name || p.dx != 0 || p.dy != 0) continue;
      if (!is_int(ex) || ex < 1) return 0;
      auto fs = m.factors;
      fs.erase(fs.begin() + static_cast<long>(i));
      rest = assemble_mul(m.rat, std::move(fs));
      return exp_to_long(ex);
    }
    return 0;
  };

  std::vector<AddBuilder> buckets(1);
  auto bump = [&](long k, const Expr& part, const Rational& scale) {
    if (k >= static_cast<long>(buckets.size())) buckets.resize(static_cast<size_t>(k) + 1);
    buckets[static_cast<size_t>(k)].push(part, scale);
  };

  const Node& n = e.node();
  if (n.kind == Kind::Add) {
    buckets[0].push(make_num(n.rat));
    for (const auto& [c, m] : n.terms) {
      Expr rest;
      long k = param_degree(m, rest);
      if (k > 0)
        bump(k, rest, c);
      else
        bump(0, m, c);
    }
  } else {
    Rational c;
    Expr monic;
    split_term(e, c, monic);
    Expr rest;
    long k = e.kind() == Kind::Num ? 0 : param_degree(monic, rest);
    if (k > 0)
      bump(k, rest, c);
    else
      buckets[0].push(e);
  }

  std::vector<Expr> out;
  out.reserve(buckets.size());
  for (auto& b : buckets) out.push_back(b.build());
  return out;
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

std::string fun_name(FunId f) {
  switch (f) {
    case FunId::Sin: return "sin";
    case FunId::Cos: return "cos";
    case FunId::Exp: return "exp";
    case FunId::Ln: return "ln";
  }
  return "?";
}

std::string print_expr(const Expr& e);

std::string print_base(const Expr& b) {
  switch (b.kind()) {
    case Kind::Add: return "(" + print_expr(b) + ")";
    case Kind::Num: {
      const Rational& q = b.node().rat;
      if (q < 0 || !is_integer(q)) return "(" + to_string(q) + ")";
      return to_string(q);
    }
    default: return print_expr(b);
  }
}

std::string print_exponent(const Rational& e) {
  std::string s = numer(e).str();
  if (!is_integer(e)) s += "/" + denom(e).str();
  return s;
}

std::string print_factor(const Expr& base, const Rational& e) {
  if (base.kind() == Kind::Num && base.node().rat == 2 && e == Rational(1, 2)) return "sqrt2";
  if (e == 1) return print_base(base);
  return print_base(base) + "^" + print_exponent(e);
}

// |coeff| * factors as numerator/denominator text. Sign handled by callers.
std::string print_product(const Rational& coeff_abs, const std::vector<std::pair<Expr, Rational>>& factors) {
  std::vector<std::string> num, den;
  for (const auto& [b, e] : factors) {
    if (e > 0)
      num.push_back(print_factor(b, e));
    else
      den.push_back(print_factor(b, Rational(-e)));
  }
  // Numeric denominators go in front as a full rational ("1/3*x^2"), never
  // after a power factor, so "^a/b" in printed output is always an exponent.
  if (coeff_abs != 1 || num.empty()) num.insert(num.begin(), to_string(coeff_abs));
  std::string s;
  for (size_t i = 0; i < num.size(); ++i) s += (i ? "*" : "") + num[i];
  if (!den.empty()) {
    if (den.size() == 1)
      s += "/" + den[0];
    else {
      std::string d;
      for (size_t i = 0; i < den.size(); ++i) d += (i ? "*" : "") + den[i];
      s += "/(" + d + ")";
    }
  }
  return s;
}

// Term magnitude text plus extracted sign.
std::pair<bool, std::string> print_signed(const Expr& e) {
  const Node& n = e.node();
  switch (n.kind) {
    case Kind::Num: {
      bool negative = n.rat < 0;
      Rational a = negative ? Rational(-n.rat) : n.rat;
      return {negative, to_string(a)};
    }
    case Kind::Mul: {
      bool negative = n.rat < 0;
      Rational a = negative ? Rational(-n.rat) : n.rat;
      return {negative, print_product(a, n.factors)};
    }
    default: return {false, print_expr(e)};
  }
}

std::string print_expr(const Expr& e) {
  const Node& n = e.node();
  switch (n.kind) {
    case Kind::Num: return to_string(n.rat);
    case Kind::Const: return "pi";
    case Kind::Var: return n.var == VarId::X ? "x" : "y";
    case Kind::Param: {
      std::string s = n.param.name;
      for (int i = 0; i < n.param.dy; ++i) s = "d/dy(" + s + ")";
      for (int i = 0; i < n.param.dx; ++i) s = "d/dx(" + s + ")";
      return s;
    }
    case Kind::Fun: return fun_name(n.fun) + "(" + print_expr(n.arg) + ")";
    case Kind::Mul: {
      auto [negative, body] = print_signed(e);
      return negative ? "-" + body : body;
    }
    case Kind::Add: {
      std::string s;
      bool first = true;
      for (const auto& [c, m] : n.terms) {
        auto [negative, body] = print_signed(assemble_term(c, m));
        if (first) {
          s += negative ? "-" + body : body;
          first = false;
        } else {
          s += negative ? " - " : " + ";
          s += body;
        }
      }
      if (n.rat != 0) {
        bool negative = n.rat < 0;
        Rational a = negative ? Rational(-n.rat) : n.rat;
        s += negative ? " - " : " + ";
        s += to_string(a);
      }
      return s;
    }
  }
  return "?";
}

}  // namespace

std::string to_string(const Expr& e) { return print_expr(e); }

}  // namespace lpdo
