#include "lpdo/lpdo.hpp"

#include <algorithm>

namespace lpdo {

namespace {

Rational binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  Rational r = 1;
  for (int i = 0; i < k; ++i) r = r * Rational(n - i) / Rational(i + 1);
  return r;
}

Expr diff_xy(const Expr& e, int j, int k) {
  Expr r = e;
  for (int i = 0; i < j; ++i) r = diff(r, VarId::X);
  for (int i = 0; i < k; ++i) r = diff(r, VarId::Y);
  return r;
}

}  // namespace

Lpdo Lpdo::from_coeff(int j, int k, const Expr& c) {
  Lpdo a;
  a.set(j, k, c);
  return a;
}

void Lpdo::set(int j, int k, const Expr& c) {
  if (j < 0 || k < 0) throw std::domain_error("negative derivative index");
  if (is_literal_zero(c))
    coeffs_.erase({j, k});
  else
    coeffs_[{j, k}] = c;
}

Expr Lpdo::coeff(int j, int k) const {
  auto it = coeffs_.find({j, k});
  return it == coeffs_.end() ? Expr() : it->second;
}

int Lpdo::order() const {
  if (coeffs_.empty()) throw ZeroOperatorError();
  int n = 0;
  for (const auto& [key, c] : coeffs_) n = std::max(n, key.first + key.second);
  return n;
}

Lpdo add(const Lpdo& a, const Lpdo& b) {
  Lpdo out = a;
  for (const auto& [key, c] : b.coeffs())
    out.set(key.first, key.second, add(out.coeff(key.first, key.second), c));
  return out;
}

Lpdo sub(const Lpdo& a, const Lpdo& b) { return add(a, neg(b)); }

Lpdo neg(const Lpdo& a) { return scale(make_int(-1), a); }

Lpdo scale(const Expr& f, const Lpdo& a) {
  Lpdo out;
  for (const auto& [key, c] : a.coeffs()) out.set(key.first, key.second, mul(f, c));
  return out;
}

Expr apply(const Lpdo& a, const Expr& u) {
  std::vector<Expr> parts;
  parts.reserve(a.coeffs().size());
  for (const auto& [key, c] : a.coeffs())
    parts.push_back(mul(c, diff_xy(u, key.first, key.second)));
  return add(std::move(parts));
}

Lpdo compose(const Lpdo& a, const Lpdo& b) {
  // Leibniz: Dx^j Dy^k (b * v) = sum over p<=j, q<=k of
  //   C(j,p) C(k,q) (Dx^p Dy^q b) Dx^(j-p) Dy^(k-q) v.
  Lpdo out;
  for (const auto& [ka, ca] : a.coeffs()) {
    int j = ka.first, k = ka.second;
    for (const auto& [kb, cb] : b.coeffs()) {
      int l = kb.first, m = kb.second;
      for (int p = 0; p <= j; ++p) {
        for (int q = 0; q <= k; ++q) {
          Expr term = mul({make_num(binomial(j, p) * binomial(k, q)), ca, diff_xy(cb, p, q)});
          int jj = j - p + l, kk = k - q + m;
          out.set(jj, kk, add(out.coeff(jj, kk), term));
        }
      }
    }
  }
  return out;
}

Lpdo transpose(const Lpdo& a) {
  if (a.is_zero_operator()) return a;
  int n = a.order();
  Lpdo out;
  for (int j = 0; j <= n; ++j) {
    for (int k = 0; j + k <= n; ++k) {
      std::vector<Expr> parts;
      for (const auto& [key, c] : a.coeffs()) {
        int b1 = key.first - j, b2 = key.second - k;
        if (b1 < 0 || b2 < 0) continue;
        Rational sign = (key.first + key.second) % 2 == 0 ? 1 : -1;
        parts.push_back(
            mul({make_num(sign * binomial(key.first, j) * binomial(key.second, k)),
                 diff_xy(c, b1, b2)}));
      }
      out.set(j, k, add(std::move(parts)));
    }
  }
  return out;
}

Lpdo gauge_conjugate(const Lpdo& a, const Expr& phi) {
  Expr phi_x = diff(phi, VarId::X);
  Expr phi_y = diff(phi, VarId::Y);
  Lpdo cx = Lpdo::dx() + Lpdo::from_expr(phi_x);
  Lpdo cy = Lpdo::dy() + Lpdo::from_expr(phi_y);

  int max_j = 0, max_k = 0;
  for (const auto& [key, c] : a.coeffs()) {
    max_j = std::max(max_j, key.first);
    max_k = std::max(max_k, key.second);
  }
  std::vector<Lpdo> px(static_cast<size_t>(max_j) + 1), py(static_cast<size_t>(max_k) + 1);
  px[0] = Lpdo::identity();
  py[0] = Lpdo::identity();
  for (int i = 1; i <= max_j; ++i) px[static_cast<size_t>(i)] = compose(cx, px[static_cast<size_t>(i) - 1]);
  for (int i = 1; i <= max_k; ++i) py[static_cast<size_t>(i)] = compose(cy, py[static_cast<size_t>(i) - 1]);

  Lpdo out;
  for (const auto& [key, c] : a.coeffs()) {
    Lpdo term = scale(c, compose(px[static_cast<size_t>(key.first)], py[static_cast<size_t>(key.second)]));
    out = out + term;
  }
  return out;
}

Expr BinaryForm::at(const Expr& s, const Expr& t) const {
  std::vector<Expr> parts;
  int d = degree();
  for (int j = 0; j <= d; ++j) {
    if (is_literal_zero(coeffs_[static_cast<size_t>(j)])) continue;
    parts.push_back(mul({coeffs_[static_cast<size_t>(j)], pow(s, Rational(j)), pow(t, Rational(d - j))}));
  }
  return add(std::move(parts));
}

BinaryForm principal_symbol(const Lpdo& a) {
  int n = a.order();  // throws on the zero operator
  BinaryForm f(n);
  for (const auto& [key, c] : a.coeffs())
    if (key.first + key.second == n) f.set_coefficient(key.first, c);
  return f;
}

std::string to_string(const Lpdo& a) {
  if (a.is_zero_operator()) return "0";
  std::vector<Lpdo::Key> keys;
  keys.reserve(a.coeffs().size());
  for (const auto& [key, c] : a.coeffs()) keys.push_back(key);
  std::sort(keys.begin(), keys.end(), [](const Lpdo::Key& p, const Lpdo::Key& q) {
    int gp = p.first + p.second, gq = q.first + q.second;
    if (gp != gq) return gp > gq;
    return p.first > q.first;
  });

  std::string s;
  bool first = true;
  for (const auto& [j, k] : keys) {
    Expr c = a.coeff(j, k);
    std::string mono;
    if (j > 0) mono += j == 1 ? "Dx" : "Dx^" + std::to_string(j);
    if (k > 0) {
      if (!mono.empty()) mono += "*";
      mono += k == 1 ? "Dy" : "Dy^" + std::to_string(k);
    }

    std::string body;
    bool negative = false;
    if (mono.empty()) {
      std::string cs = to_string(c);
      if (!cs.empty() && cs[0] == '-') {
        negative = true;
        cs = cs.substr(1);
      }
      body = cs;
    } else if (is_literal_one(c)) {
      body = mono;
    } else if (c == make_int(-1)) {
      negative = true;
      body = mono;
    } else {
      std::string cs = to_string(c);
      bool wrap = c.kind() == Kind::Add;
      if (!wrap && !cs.empty() && cs[0] == '-') {
        negative = true;
        cs = cs.substr(1);
        // A stripped leading sign must cover the whole coefficient.
        wrap = cs.find_first_of("+-") != std::string::npos;
        if (wrap) {
          negative = false;
          cs = to_string(c);
        }
      }
      body = (wrap ? "(" + cs + ")" : cs) + "*" + mono;
    }

    if (first) {
      s += negative ? "-" + body : body;
      first = false;
    } else {
      s += negative ? " - " : " + ";
      s += body;
    }
  }
  return s;
}

}  // namespace lpdo
