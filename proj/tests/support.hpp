#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "lpdo/eval.hpp"
#include "lpdo/factor.hpp"
#include "lpdo/parse.hpp"

namespace lpdo::testing {

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}

  long integer(long lo, long hi) {
    return static_cast<long>(gen() % static_cast<std::uint64_t>(hi - lo + 1)) + lo;
  }
  double real(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(gen() >> 11) * 0x1.0p-53);
  }
  Rational rational() {
    long num = integer(-4, 4);
    long den = integer(1, 4);
    return Rational(num, den);
  }
  Rational nonzero_rational() {
    Rational q = rational();
    return q == 0 ? Rational(1) : q;
  }

  /// Random polynomial in x, y of total degree <= deg with small coefficients.
  Expr poly(int deg = 2) {
    std::vector<Expr> terms;
    for (int j = 0; j <= deg; ++j)
      for (int k = 0; j + k <= deg; ++k)
        if (integer(0, 2) == 0)
          terms.push_back(mul({make_num(rational()), pow(var_x(), Rational(j)),
                               pow(var_y(), Rational(k))}));
    terms.push_back(make_num(rational()));
    return add(std::move(terms));
  }

  /// Random smooth expression safe to evaluate on [0.3, 1.7]^2.
  Expr smooth(int depth = 2) {
    switch (integer(0, depth > 0 ? 6 : 3)) {
      case 0: return var_x();
      case 1: return var_y();
      case 2: return make_num(rational());
      case 3: return add(mul(make_num(nonzero_rational()), var_x()),
                         mul(make_num(rational()), var_y()));
      case 4: {
        Expr inner = add(mul(make_num(rational()), var_x()), mul(make_num(rational()), var_y()));
        return integer(0, 1) ? sin(inner) : cos(inner);
      }
      case 5: {
        Expr a = smooth(depth - 1), b = smooth(depth - 1);
        return integer(0, 1) ? add(a, b) : mul(a, b);
      }
      default:
        // A pole/branch placed away from the sample box.
        return pow(add({var_x(), var_y(), make_int(3)}),
                   integer(0, 1) ? Rational(-1) : Rational(1, 2));
    }
  }

  /// Random operator of the exact order given, polynomial coefficients.
  Lpdo op_of_order(int n, int coeff_deg = 1) {
    Lpdo a;
    for (int j = 0; j <= n; ++j)
      for (int k = 0; j + k <= n; ++k)
        if (integer(0, 1) == 0) a.set(j, k, poly(coeff_deg));
    // Pin a nonzero principal part.
    int j = static_cast<int>(integer(0, n));
    a.set(j, n - j, make_num(nonzero_rational()));
    return a;
  }

  /// First-order factor Dx - w*Dy + p with constant rational symbol root.
  LinearFactor first_order(const Rational& omega) {
    return {make_int(1), make_num(Rational(-omega)), poly(1)};
  }
};

/// Central finite difference in x (independent of the symbolic path).
inline double fd_diff_x(const Expr& e, double x, double y, double h = 1e-5) {
  return (eval(e, x + h, y) - eval(e, x - h, y)) / (2 * h);
}
inline double fd_diff_y(const Expr& e, double x, double y, double h = 1e-5) {
  return (eval(e, x, y + h) - eval(e, x, y - h)) / (2 * h);
}

/// Numeric operator application via nested central differences.
inline double fd_apply_term(const Expr& u, int j, int k, double x, double y, double h) {
  if (j > 0)
    return (fd_apply_term(u, j - 1, k, x + h, y, h) - fd_apply_term(u, j - 1, k, x - h, y, h)) /
           (2 * h);
  if (k > 0)
    return (fd_apply_term(u, j, k - 1, x, y + h, h) - fd_apply_term(u, j, k - 1, x, y - h, h)) /
           (2 * h);
  return eval(u, x, y);
}

inline double fd_apply(const Lpdo& a, const Expr& u, double x, double y, double h = 1e-4) {
  double acc = 0;
  for (const auto& [key, c] : a.coeffs())
    acc += eval(c, x, y) * fd_apply_term(u, key.first, key.second, x, y, h);
  return acc;
}

inline bool close_rel(double a, double b, double rtol, double atol = 1e-12) {
  return std::fabs(a - b) <= rtol * (1 + std::fabs(a) + std::fabs(b)) + atol;
}

}  // namespace lpdo::testing
