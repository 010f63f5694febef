#include "lpdo/factor.hpp"

#include <algorithm>
#include <cassert>

namespace lpdo {

namespace {

Expr dx(const Expr& e) { return diff(e, VarId::X); }
Expr dy(const Expr& e) { return diff(e, VarId::Y); }

struct FormDivision {
  std::vector<Expr> quotient;  // degree d-1; quotient[j] multiplies s^j t^(d-1-j)
  Expr remainder;              // the form evaluated at (beta, -alpha)
};

// Divides a degree-d form by alpha*s + beta*t for the two normalized
// directions. The remainder vanishes exactly when the direction is a root.
FormDivision divide_linear(const BinaryForm& f, const RootDirection& root) {
  int d = f.degree();
  std::vector<Expr> g(static_cast<size_t>(d));
  if (root.infinite) {
    // f = t*g + f_d s^d; (beta, -alpha) = (1, 0).
    for (int j = 0; j < d; ++j) g[static_cast<size_t>(j)] = f.coefficient(j);
    return {std::move(g), f.coefficient(d)};
  }
  // f = (s - w t) g + R t^d by Horner; f(-w, -1) = (-1)^d R.
  const Expr& w = root.omega;
  g[static_cast<size_t>(d) - 1] = f.coefficient(d);
  for (int j = d - 1; j >= 1; --j)
    g[static_cast<size_t>(j) - 1] = add(f.coefficient(j), mul(w, g[static_cast<size_t>(j)]));
  Expr r = add(f.coefficient(0), mul(w, g[0]));
  return {std::move(g), d % 2 == 0 ? r : neg(r)};
}

struct Extraction {
  LinearFactor left;
  Lpdo quotient;
  std::vector<Invariant> invariants;              // grades n-2 .. 0
  std::optional<std::pair<int, Expr>> top_residual;  // grade n-1, multiple-root mode only
};

// The matching system for A = (alpha*Dx + beta*Dy + p) o Q, solved grade by
// grade from the top:
//   a_jk = alpha*q_(j-1)k + beta*q_j(k-1) + alpha*dx(q_jk) + beta*dy(q_jk) + p*q_jk.
// Grade n is exact division of the principal symbol by alpha*s + beta*t;
// grade n-1 determines p (solvable iff the root is simple, otherwise p is the
// caller-supplied unknown); each lower grade m is another form division whose
// remainder, evaluated at (s,t) = (beta,-alpha), is the invariant inv[m].
Extraction run_extraction(const Lpdo& a, const RootDirection& root,
                          const std::optional<Expr>& forced_p) {
  int n = a.order();
  if (n < 1) throw std::domain_error("factor extraction requires order >= 1");
  Expr alpha = root.alpha();
  Expr beta = root.beta();

  Extraction out;
  FormDivision top = divide_linear(principal_symbol(a), root);
  if (!is_zero(top.remainder))
    throw std::domain_error("direction is not a root of the principal symbol");

  Lpdo q;
  for (int j = 0; j < n; ++j) q.set(j, n - 1 - j, top.quotient[static_cast<size_t>(j)]);

  // Residual form at grade m: knowns moved to the left-hand side.
  auto residual_form = [&](int m, const std::optional<Expr>& p) {
    BinaryForm r(m);
    for (int j = 0; j <= m; ++j) {
      Expr qjk = q.coeff(j, m - j);
      std::vector<Expr> knowns{mul(alpha, dx(qjk)), mul(beta, dy(qjk))};
      if (p) knowns.push_back(mul(*p, qjk));
      r.set_coefficient(j, sub(a.coeff(j, m - j), add(std::move(knowns))));
    }
    return r;
  };

  Expr dir_s = beta;
  Expr dir_t = neg(alpha);

  // Grade n-1: solve for p.
  BinaryForm rform = residual_form(n - 1, std::nullopt);
  Expr r_at_dir = rform.at(dir_s, dir_t);
  BinaryForm qform(n - 1);
  for (int j = 0; j < n; ++j) qform.set_coefficient(j, top.quotient[static_cast<size_t>(j)]);
  Expr q_at_dir = qform.at(dir_s, dir_t);

  Expr p;
  if (forced_p) {
    if (!is_zero(q_at_dir))
      throw MultipleRootError("root is simple; use extract_left_factor");
    p = *forced_p;
    out.top_residual = {n - 1, r_at_dir};
  } else {
    if (is_zero(q_at_dir))
      throw MultipleRootError("root is multiple; use riccati_obstruction");
    p = div(r_at_dir, q_at_dir);
  }
  out.left = {alpha, beta, p};

  // Grades n-1 .. 1 feed a form division each; its quotient is the next row
  // of Q and its remainder the invariant.
  for (int m = n - 1; m >= 1; --m) {
    BinaryForm s(m);
    if (m == n - 1) {
      for (int j = 0; j <= m; ++j)
        s.set_coefficient(j, sub(rform.coefficient(j), mul(p, qform.coefficient(j))));
    } else {
      s = residual_form(m, p);
      out.invariants.push_back({m, s.at(dir_s, dir_t), ZeroVerdict::ProvenNonzero});
    }
    FormDivision down = divide_linear(s, root);
    for (int j = 0; j < m; ++j) q.set(j, m - 1 - j, down.quotient[static_cast<size_t>(j)]);
  }

  // Grade 0: the last equation's residual. For n == 1 that equation already
  // determined p, so first order carries no invariants.
  if (n >= 2) {
    Expr q00 = q.coeff(0, 0);
    Expr inv0 = sub(a.coeff(0, 0), add({mul(alpha, dx(q00)), mul(beta, dy(q00)), mul(p, q00)}));
    out.invariants.push_back({0, inv0, ZeroVerdict::ProvenNonzero});
  }

  for (auto& inv : out.invariants) inv.verdict = zero_verdict(inv.value);
  out.quotient = q;
  return out;
}

bool all_zero(const std::vector<Invariant>& invs) {
  return std::all_of(invs.begin(), invs.end(),
                     [](const Invariant& i) { return i.verdict != ZeroVerdict::ProvenNonzero; });
}

// Monic normalization in r: divide through by the r^2 coefficient.
Expr normalize_riccati(const Expr& residual) {
  std::vector<Expr> buckets = collect_param_powers(residual, kRiccatiUnknown);
  if (buckets.size() < 3 || is_literal_zero(buckets[2])) return residual;
  Expr lead = buckets[2];
  Expr r = make_param(kRiccatiUnknown, true, true);
  std::vector<Expr> parts;
  for (size_t k = 0; k < buckets.size(); ++k)
    parts.push_back(mul(div(buckets[k], lead), pow(r, Rational(static_cast<long>(k)))));
  return add(std::move(parts));
}

bool coefficients_vanish(const Lpdo& d) {
  for (const auto& [key, c] : d.coeffs())
    if (!is_zero(c)) return false;
  return true;
}

}  // namespace

std::string to_string(const RootDirection& r) {
  std::string s = r.infinite ? "inf" : to_string(r.omega);
  if (r.multiplicity != 1) s += " (x" + std::to_string(r.multiplicity) + ")";
  return s;
}

Lpdo to_lpdo(const LinearFactor& f) {
  Lpdo a;
  a.set(1, 0, f.alpha);
  a.set(0, 1, f.beta);
  a.set(0, 0, f.p);
  return a;
}

std::string to_string(const LinearFactor& f) { return to_string(to_lpdo(f)); }

const char* to_string(FactorStatus s) {
  switch (s) {
    case FactorStatus::Factored: return "factored";
    case FactorStatus::Obstructed: return "obstructed";
    case FactorStatus::RiccatiRequired: return "riccati-required";
  }
  return "?";
}

FactorizationReport extract_left_factor(const Lpdo& a, const RootDirection& root) {
  Extraction ext = run_extraction(a, root, std::nullopt);
  FactorizationReport rep;
  rep.root = root;
  rep.side = FactorSide::Left;
  rep.factor = ext.left;
  rep.cofactor = ext.quotient;
  rep.invariants = std::move(ext.invariants);
  rep.status = all_zero(rep.invariants) ? FactorStatus::Factored : FactorStatus::Obstructed;
  return rep;
}

std::pair<Expr, Expr> laplace_invariants(const Lpdo& op) {
  if (op.is_zero_operator() || op.order() != 2 || !is_literal_one(op.coeff(1, 1)) ||
      !is_literal_zero(op.coeff(2, 0)) || !is_literal_zero(op.coeff(0, 2)))
    throw std::domain_error("operator is not in the normal form Dx*Dy + a*Dx + b*Dy + c");
  Expr a = op.coeff(1, 0), b = op.coeff(0, 1), c = op.coeff(0, 0);
  Expr ab = mul(a, b);
  return {sub(c, add(ab, dx(a))), sub(c, add(ab, dy(b)))};
}

FactorizationReport riccati_obstruction(const Lpdo& a, const RootDirection& root) {
  Expr r = make_param(kRiccatiUnknown, true, true);
  Extraction ext = run_extraction(a, root, r);

  FactorizationReport rep;
  rep.root = root;
  rep.side = FactorSide::Left;
  rep.factor = ext.left;
  rep.cofactor = ext.quotient;
  rep.invariants = std::move(ext.invariants);

  // First non-satisfiable equation, in grade order of computation.
  std::vector<std::pair<int, Expr>> residuals;
  if (ext.top_residual) residuals.push_back(*ext.top_residual);
  for (const auto& inv : rep.invariants)
    if (inv.verdict == ZeroVerdict::ProvenNonzero) residuals.emplace_back(inv.grade, inv.value);

  if (ext.top_residual && !is_zero(ext.top_residual->second)) {
    // Fails before r can matter: an unconditional obstruction.
    rep.status = FactorStatus::Obstructed;
    rep.riccati = ext.top_residual->second;
    return rep;
  }
  for (const auto& [grade, value] : residuals) {
    (void)grade;
    if (is_zero(value)) continue;
    if (contains_param(value, kRiccatiUnknown)) {
      rep.status = FactorStatus::RiccatiRequired;
      rep.riccati = normalize_riccati(value);
    } else {
      rep.status = FactorStatus::Obstructed;
      rep.riccati = value;
    }
    return rep;
  }
  // Every residual vanishes identically in r: any r yields a factorization.
  rep.status = FactorStatus::RiccatiRequired;
  rep.riccati = Expr();
  return rep;
}

FactorizationReport verify_riccati(const Lpdo& a, const RootDirection& root,
                                   const Expr& candidate) {
  Expr r = make_param(kRiccatiUnknown, true, true);
  Extraction ext = run_extraction(a, root, r);

  FactorizationReport rep;
  rep.root = root;
  rep.side = FactorSide::Left;
  rep.factor = {ext.left.alpha, ext.left.beta, candidate};

  Lpdo q;
  for (const auto& [key, c] : ext.quotient.coeffs())
    q.set(key.first, key.second, substitute_param(c, kRiccatiUnknown, candidate));
  rep.cofactor = q;

  bool ok = true;
  if (ext.top_residual) {
    Expr v = substitute_param(ext.top_residual->second, kRiccatiUnknown, candidate);
    ok = ok && is_zero(v);
  }
  for (const auto& inv : ext.invariants) {
    Expr v = substitute_param(inv.value, kRiccatiUnknown, candidate);
    ZeroVerdict verdict = zero_verdict(v);
    rep.invariants.push_back({inv.grade, v, verdict});
    ok = ok && verdict != ZeroVerdict::ProvenNonzero;
  }
  // The assembled pair must recompose to A.
  ok = ok && coefficients_vanish(sub(compose(to_lpdo(rep.factor), rep.cofactor), a));
  rep.status = ok ? FactorStatus::Factored : FactorStatus::RiccatiRequired;
  if (!ok) {
    FactorizationReport obstruction = riccati_obstruction(a, root);
    rep.riccati = obstruction.riccati;
  }
  return rep;
}

FactorizationReport extract_right_factor(const Lpdo& a, const RootDirection& root) {
  FactorizationReport dual = extract_left_factor(transpose(a), root);

  // A^t = L o Q implies A = Q^t o L^t; flip both signs so the right factor
  // carries the root's representative direction.
  Lpdo lt = neg(transpose(to_lpdo(dual.factor)));
  FactorizationReport rep;
  rep.root = root;
  rep.side = FactorSide::Right;
  rep.status = dual.status;
  rep.invariants = std::move(dual.invariants);
  rep.riccati = dual.riccati;
  rep.factor = {lt.coeff(1, 0), lt.coeff(0, 1), lt.coeff(0, 0)};
  rep.cofactor = neg(transpose(dual.cofactor));
  return rep;
}

// ---------------------------------------------------------------------------
// Roots of the characteristic polynomial
// ---------------------------------------------------------------------------

namespace {

bool is_const_poly(const std::vector<Expr>& p) {
  return std::all_of(p.begin(), p.end(), [](const Expr& c) { return is_rational(c); });
}

Expr poly_at(const std::vector<Expr>& p, const Expr& t) {
  Expr acc;
  for (size_t j = p.size(); j-- > 0;) acc = add(mul(acc, t), p[j]);
  return acc;
}

std::vector<Expr> poly_derivative(const std::vector<Expr>& p) {
  std::vector<Expr> d;
  for (size_t j = 1; j < p.size(); ++j) d.push_back(mul(make_num(Rational(static_cast<long>(j))), p[j]));
  if (d.empty()) d.push_back(Expr());
  return d;
}

// Synthetic division by (t - w); the caller has verified the root.
std::vector<Expr> poly_deflate(const std::vector<Expr>& p, const Expr& w) {
  size_t d = p.size() - 1;
  std::vector<Expr> q(d);
  q[d - 1] = p[d];
  for (size_t j = d - 1; j >= 1; --j) q[j - 1] = add(p[j], mul(w, q[j]));
  return q;
}

// Divisors of |v|, capped; used for rational-root candidates.
std::vector<BigInt> divisors_of(BigInt v, size_t cap = 64) {
  if (v < 0) v = -v;
  std::vector<BigInt> out;
  if (v == 0) return out;
  for (BigInt d = 1; d * d <= v && out.size() < cap; ++d) {
    if (v % d == 0) {
      out.push_back(d);
      if (d * d != v) out.push_back(v / d);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void rational_root_deflation(std::vector<Expr>& p, std::vector<Expr>& found) {
  while (p.size() > 1) {
    BigInt scale = 1;
    for (const Expr& c : p) scale = boost::multiprecision::lcm(scale, denom(rational_value(c)));
    std::vector<BigInt> ints;
    for (const Expr& c : p) ints.push_back(numer(rational_value(c) * Rational(scale)));
    bool hit = false;
    for (const BigInt& pn : divisors_of(ints.front())) {
      for (const BigInt& qd : divisors_of(ints.back())) {
        for (int sign = 1; sign >= -1 && !hit; sign -= 2) {
          Rational cand(sign * pn, qd);
          Expr w = make_num(cand);
          if (is_literal_zero(poly_at(p, w))) {
            found.push_back(w);
            p = poly_deflate(p, w);
            hit = true;
          }
        }
        if (hit) break;
      }
      if (hit) break;
    }
    if (!hit) return;
  }
}

Expr sqrt_expr(const Expr& e) { return pow(e, Rational(1, 2)); }
Expr cbrt_expr(const Expr& e) { return pow(e, Rational(1, 3)); }

// Exact square root for single monomials and binomial squares such as
// x^2 + 2x + 1; keeps discriminant roots of symbols with polynomial
// coefficients in polynomial form whenever that is possible.
std::optional<Expr> sqrt_exact(const Expr& e) {
  if (is_literal_zero(e)) return Expr();
  auto half_term = [](const Expr& term) -> std::optional<Expr> {
    Rational c = 1;
    Expr monic = term;
    if (term.kind() == Kind::Mul) {
      c = term.node().rat;
      monic = div(term, make_num(c));
    } else if (term.kind() == Kind::Num) {
      c = term.node().rat;
      monic = make_int(1);
    }
    if (c < 0) return std::nullopt;
    auto rc = rat_nth_root(c, 2);
    if (!rc) return std::nullopt;
    std::vector<Expr> parts{make_num(*rc)};
    if (!is_literal_one(monic)) {
      if (monic.kind() != Kind::Mul) return std::nullopt;
      for (const auto& [b, ex] : monic.node().factors) {
        if (!is_integer(ex) || numer(ex) % 2 != 0) return std::nullopt;
        parts.push_back(pow(b, ex / 2));
      }
    }
    return mul(std::move(parts));
  };

  std::vector<Expr> entries;
  if (e.kind() == Kind::Add) {
    const Node& n = e.node();
    for (const auto& [c, m] : n.terms) entries.push_back(mul(make_num(c), m));
    if (n.rat != 0) entries.push_back(make_num(n.rat));
  } else {
    entries.push_back(e);
  }
  std::vector<Expr> halves;
  for (const Expr& t : entries)
    if (auto h = half_term(t)) halves.push_back(*h);
  if (entries.size() == 1 && halves.size() == 1 && mul(halves[0], halves[0]) == e)
    return halves[0];
  for (size_t i = 0; i < halves.size(); ++i) {
    for (size_t j = i + 1; j < halves.size(); ++j) {
      for (int sign = 1; sign >= -1; sign -= 2) {
        Expr u = add(halves[i], sign > 0 ? halves[j] : neg(halves[j]));
        if (mul(u, u) == e) return u;
      }
    }
  }
  return std::nullopt;
}

// Quadratic formula; emits the +sqrt branch first. Returns false for a
// provably negative constant discriminant (no real roots).
bool quadratic_roots(const std::vector<Expr>& p, std::vector<Expr>& found) {
  const Expr &c0 = p[0], &c1 = p[1], &c2 = p[2];
  Expr disc = sub(mul(c1, c1), mul({make_int(4), c2, c0}));
  if (is_zero(disc)) {
    found.push_back(div(neg(c1), mul(make_int(2), c2)));
    return true;
  }
  if (is_rational(disc) && rational_value(disc) < 0) return false;
  Expr sq;
  if (auto exact = sqrt_exact(disc))
    sq = *exact;
  else
    sq = sqrt_expr(disc);
  Expr denom2 = mul(make_int(2), c2);
  found.push_back(div(add(neg(c1), sq), denom2));
  found.push_back(div(sub(neg(c1), sq), denom2));
  return true;
}

// One real root of a rational cubic with negative discriminant (the real
// radical case). Rational roots and the casus irreducibilis are handled by
// the callers.
bool cardano_real_root(const std::vector<Expr>& poly, std::vector<Expr>& found) {
  Rational c3 = rational_value(poly[3]), c2 = rational_value(poly[2]),
           c1 = rational_value(poly[1]), c0 = rational_value(poly[0]);
  Rational b = c2 / c3, c = c1 / c3, d = c0 / c3;
  // Depress: t = u - b/3.
  Rational pr = c - b * b / 3;
  Rational qr = Rational(2) * b * b * b / 27 - b * c / 3 + d;
  Rational delta = qr * qr / 4 + pr * pr * pr / 27;
  if (delta <= 0) return false;  // three real roots: not radical-expressible over the reals
  Expr root_delta = sqrt_expr(make_num(delta));
  Expr mq2 = make_num(-qr / 2);
  Expr u = cbrt_expr(add(mq2, root_delta));
  Expr v = cbrt_expr(sub(mq2, root_delta));
  found.push_back(add({u, v, make_num(-b / 3)}));
  return true;
}

// Real roots of a rational quartic via a resolvent-cubic factorization into
// two quadratics. Quadratic branches without real roots are dropped.
bool ferrari_roots(const std::vector<Expr>& poly, std::vector<Expr>& found) {
  Rational c4 = rational_value(poly[4]), c3 = rational_value(poly[3]),
           c2 = rational_value(poly[2]), c1 = rational_value(poly[1]),
           c0 = rational_value(poly[0]);
  Rational b = c3 / c4, c = c2 / c4, d = c1 / c4, e = c0 / c4;
  // Depress: t = u - b/4 -> u^4 + P u^2 + Q u + R.
  Rational P = c - Rational(3) * b * b / 8;
  Rational Q = d - b * c / 2 + b * b * b / 8;
  Rational R = e - b * d / 4 + b * b * c / 16 - Rational(3) * rat_pow(b, 4) / 256;
  Expr shift = make_num(-b / 4);
  if (Q == 0) {
    // Biquadratic: u^2 = z with z^2 + P z + R = 0.
    std::vector<Expr> zroots;
    if (!quadratic_roots({make_num(R), make_num(P), make_int(1)}, zroots)) return false;
    for (const Expr& z : zroots) {
      double zv = eval_or_nan(z, 0, 0);
      if (!(zv >= 0)) continue;
      Expr su = sqrt_expr(z);
      found.push_back(add(su, shift));
      found.push_back(add(neg(su), shift));
    }
    return !found.empty();
  }
  // Resolvent: 8 m^3 + 8 P m^2 + (2 P^2 - 8 R) m - Q^2 = 0; any real root
  // with 2m > 0 splits the quartic into two quadratics.
  std::vector<Expr> res{make_num(-Q * Q), make_num(Rational(2) * P * P - Rational(8) * R),
                        make_num(Rational(8) * P), make_num(Rational(8))};
  std::vector<Expr> mroots;
  rational_root_deflation(res, mroots);
  if (mroots.empty()) cardano_real_root(res, mroots);
  for (const Expr& m : mroots) {
    double mv = eval_or_nan(m, 0, 0);
    if (!(mv > 0)) continue;
    Expr s = sqrt_expr(mul(make_int(2), m));
    Expr t1 = add(make_num(P / 2), m);
    Expr t2 = div(make_num(Q / 2), s);
    // u^2 + s u + (P/2 + m - Q/(2s)) and u^2 - s u + (P/2 + m + Q/(2s)).
    for (int pick = 0; pick < 2; ++pick) {
      Expr lin = pick == 0 ? s : neg(s);
      Expr cst = pick == 0 ? sub(t1, t2) : add(t1, t2);
      std::vector<Expr> quad{cst, lin, make_int(1)};
      std::vector<Expr> uroots;
      Expr disc = sub(mul(lin, lin), mul(make_int(4), cst));
      double dv = eval_or_nan(disc, 0, 0);
      if (!(dv >= 0)) continue;
      if (quadratic_roots(quad, uroots))
        for (const Expr& u : uroots) found.push_back(add(u, shift));
    }
    if (!found.empty()) return true;
  }
  return !found.empty();
}

// Candidate roots for nonconstant symbols: signed monomials harvested from
// the polynomial's coefficients (this is how the -x root of an operator like
// Landau's is found).
std::vector<Expr> monomial_candidates(const std::vector<Expr>& p) {
  std::vector<Expr> cands;
  auto push = [&](const Expr& e) {
    if (is_literal_zero(e)) return;
    for (const Expr& c : cands)
      if (c == e) return;
    cands.push_back(e);
    cands.push_back(neg(e));
  };
  for (const Expr& c : p) {
    const Node& n = c.node();
    auto harvest = [&](const Rational& coeff, const Expr& monic) {
      push(monic);
      if (coeff != 1 && coeff != -1) {
        push(make_num(coeff));
        Rational a = coeff < 0 ? Rational(-coeff) : coeff;
        push(mul(make_num(a), monic));
      }
    };
    switch (n.kind) {
      case Kind::Num: push(c); break;
      case Kind::Add: {
        for (const auto& [tc, m] : n.terms) harvest(tc, m);
        if (n.rat != 0) push(make_num(n.rat));
        break;
      }
      case Kind::Mul: harvest(n.rat, div(c, make_num(n.rat))); break;
      default: push(c); break;
    }
  }
  push(make_int(1));
  return cands;
}

void candidate_deflation(std::vector<Expr>& p, std::vector<Expr>& found) {
  bool progress = true;
  while (progress && p.size() > 3) {
    progress = false;
    for (const Expr& cand : monomial_candidates(p)) {
      if (is_zero(poly_at(p, cand))) {
        found.push_back(cand);
        p = poly_deflate(p, cand);
        progress = true;
        break;
      }
    }
  }
}

}  // namespace

RootAnalysis roots(const Lpdo& a) {
  int n = a.order();
  if (n < 1) throw std::domain_error("roots: operator has order 0");
  BinaryForm sym = principal_symbol(a);

  std::vector<Expr> p(static_cast<size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) p[static_cast<size_t>(j)] = sym.coefficient(j);

  int deg = n;
  while (deg > 0 && is_zero(p[static_cast<size_t>(deg)])) --deg;
  if (deg == 0 && is_zero(p[0])) throw std::domain_error("principal symbol vanishes");
  int inf_mult = n - deg;
  p.resize(static_cast<size_t>(deg) + 1);

  std::vector<Expr> found;
  int leading_zeros = 0;
  while (leading_zeros < deg && is_zero(p[static_cast<size_t>(leading_zeros)])) ++leading_zeros;
  if (leading_zeros > 0) {
    found.push_back(Expr());
    p.erase(p.begin(), p.begin() + leading_zeros);
  }

  int unresolved = 0;
  if (p.size() > 1) {
    if (is_const_poly(p)) {
      rational_root_deflation(p, found);
      if (p.size() == 2) {
        found.push_back(div(neg(p[0]), p[1]));
      } else if (p.size() == 3) {
        if (!quadratic_roots(p, found)) unresolved += 2;
      } else if (p.size() == 4) {
        std::vector<Expr> got;
        if (cardano_real_root(p, got)) found.insert(found.end(), got.begin(), got.end());
        // Remaining quadratic cofactor roots (if any) are complex in the
        // delta > 0 branch; the delta <= 0 branch stays unresolved.
      } else if (p.size() == 5) {
        ferrari_roots(p, found);
      }
    } else {
      if (p.size() > 3) candidate_deflation(p, found);
      if (p.size() == 2) {
        found.push_back(div(neg(p[0]), p[1]));
      } else if (p.size() == 3) {
        if (!quadratic_roots(p, found)) unresolved += 2;
      }
    }
  }

  // Verify each distinct candidate and measure its multiplicity through
  // derivative zero-tests of the full characteristic polynomial.
  std::vector<Expr> charpoly(static_cast<size_t>(deg) + 1);
  for (int j = 0; j <= deg; ++j) charpoly[static_cast<size_t>(j)] = sym.coefficient(j);

  RootAnalysis out;
  std::vector<Expr> distinct;
  for (const Expr& w : found) {
    bool dup = false;
    for (const Expr& seen : distinct)
      if (is_zero(sub(w, seen))) dup = true;
    if (!dup) distinct.push_back(w);
  }
  int accounted = 0;
  for (const Expr& w : distinct) {
    int mult = 0;
    std::vector<Expr> d = charpoly;
    while (mult < deg && is_zero(poly_at(d, w))) {
      ++mult;
      d = poly_derivative(d);
    }
    if (mult == 0) continue;
    out.roots.push_back(RootDirection::finite(w, mult));
    accounted += mult;
  }
  std::stable_sort(out.roots.begin(), out.roots.end(),
                   [](const RootDirection& a_, const RootDirection& b_) {
                     return a_.multiplicity < b_.multiplicity;
                   });
  out.unresolved = std::max(unresolved, deg - accounted);
  if (inf_mult > 0) out.roots.push_back(RootDirection::at_infinity(inf_mult));
  return out;
}

// ---------------------------------------------------------------------------
// Full factorization
// ---------------------------------------------------------------------------

namespace {

std::optional<RootDirection> validate_root(const Lpdo& a, const RootDirection& user) {
  int n = a.order();
  BinaryForm sym = principal_symbol(a);
  if (user.infinite) {
    int deg = n;
    std::vector<Expr> p(static_cast<size_t>(n) + 1);
    for (int j = 0; j <= n; ++j) p[static_cast<size_t>(j)] = sym.coefficient(j);
    while (deg > 0 && is_zero(p[static_cast<size_t>(deg)])) --deg;
    if (deg == n) return std::nullopt;
    return RootDirection::at_infinity(n - deg);
  }
  std::vector<Expr> p(static_cast<size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) p[static_cast<size_t>(j)] = sym.coefficient(j);
  int mult = 0;
  std::vector<Expr> d = p;
  while (mult < n && is_zero(poly_at(d, user.omega))) {
    ++mult;
    d = poly_derivative(d);
  }
  if (mult == 0) return std::nullopt;
  return RootDirection::finite(user.omega, mult);
}

struct Search {
  const Lpdo& input;
  FactorOptions options;
  FactorizationResult result;
  size_t riccati_idx = 0;
  bool done = false;

  void recurse(const Lpdo& op, std::vector<LinearFactor>& prefix) {
    if (done) return;
    if (op.order() == 1) {
      LinearFactor leaf{op.coeff(1, 0), op.coeff(0, 1), op.coeff(0, 0)};
      prefix.push_back(leaf);
      emit(prefix);
      prefix.pop_back();
      return;
    }

    std::vector<RootDirection> candidates;
    for (const RootDirection& u : options.user_roots)
      if (auto v = validate_root(op, u)) candidates.push_back(*v);
    RootAnalysis an = roots(op);
    if (an.unresolved > 0 && candidates.empty()) result.unresolved_roots = true;
    for (const RootDirection& r : an.roots) {
      bool dup = false;
      for (const RootDirection& c : candidates) {
        if (c.infinite != r.infinite) continue;
        if (c.infinite || is_zero(sub(c.omega, r.omega))) dup = true;
      }
      if (!dup) candidates.push_back(r);
    }

    for (const RootDirection& root : candidates) {
      if (done) return;
      if (root.multiplicity == 1) {
        FactorizationReport rep;
        try {
          rep = extract_left_factor(op, root);
        } catch (const std::domain_error&) {
          continue;
        }
        if (rep.status == FactorStatus::Factored) {
          prefix.push_back(rep.factor);
          recurse(rep.cofactor, prefix);
          prefix.pop_back();
        } else {
          result.obstructions.push_back(rep);
        }
      } else {
        FactorizationReport rep;
        try {
          rep = riccati_obstruction(op, root);
        } catch (const std::domain_error&) {
          continue;
        }
        if (riccati_idx < options.riccati_candidates.size()) {
          Expr cand = options.riccati_candidates[riccati_idx++];
          FactorizationReport ver = verify_riccati(op, root, cand);
          if (ver.status == FactorStatus::Factored) {
            prefix.push_back(ver.factor);
            recurse(ver.cofactor, prefix);
            prefix.pop_back();
            continue;
          }
        }
        result.obstructions.push_back(rep);
      }
    }
  }

  void emit(const std::vector<LinearFactor>& chain) {
    Lpdo prod = Lpdo::identity();
    for (const LinearFactor& f : chain) prod = compose(prod, to_lpdo(f));
    if (!coefficients_vanish(sub(prod, input))) return;
    result.chains.push_back({chain});
    if (!options.all) done = true;
  }
};

}  // namespace

std::optional<RootDirection> classify_root(const Lpdo& a, const RootDirection& candidate) {
  return validate_root(a, candidate);
}

std::string to_string(const FactorChain& c) {
  std::string s;
  for (const LinearFactor& f : c.factors) s += "[" + to_string(f) + "]";
  return s;
}

FactorizationResult full_factorization(const Lpdo& a, const FactorOptions& options) {
  if (a.is_zero_operator()) throw ZeroOperatorError();
  if (a.order() < 1) throw std::domain_error("full_factorization requires order >= 1");
  Search search{a, options, {}, 0, false};
  std::vector<LinearFactor> prefix;
  search.recurse(a, prefix);
  if (!search.result.chains.empty()) search.result.obstructions.clear();
  return search.result;
}

}  // namespace lpdo
