#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lpdo/grid.hpp"
#include "support.hpp"

using namespace lpdo;
using lpdo::testing::Rng;

namespace {

Lpdo op_b() {
  return parse_operator("Dx^2 - Dy^2 + sin(y)*Dx + cos(x)*Dy + 1/2*(sin(y)^2 - cos(x)^2)");
}

Lpdo op_b_tilde() {
  Expr f = parse_expr("sin(1/(x*y))");
  return scale_operator(op_b(), f, {{1, 0}, {0, 1}, {0, 0}});
}

}  // namespace

TEST_CASE("scale_operator") {
  Lpdo bt = op_b_tilde();
  Lpdo expected = parse_operator(
      "Dx^2 - Dy^2 + sin(y)*sin(1/(x*y))*Dx + cos(x)*sin(1/(x*y))*Dy"
      " + 1/2*(sin(y)^2 - cos(x)^2)*sin(1/(x*y))");
  CHECK(bt == expected);

  CHECK(scale_operator(op_b(), make_int(1), {{1, 0}}) == op_b());
  Lpdo principal_only = scale_operator(op_b(), Expr(), {{1, 0}, {0, 1}, {0, 0}});
  CHECK(principal_only == parse_operator("Dx^2 - Dy^2"));
  CHECK_THROWS_AS(scale_operator(op_b(), make_int(1), {{3, 3}}), std::domain_error);
}

TEST_CASE("grid spec validation and defaults") {
  GridSpec def;
  CHECK(def.nx == 200);
  CHECK(def.ny == 200);
  GridSpec bad;
  bad.x1 = bad.x0;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
  GridSpec small;
  small.nx = 1;
  CHECK_THROWS_AS(small.validate(), std::domain_error);
}

TEST_CASE("invariant field of the unbounded example") {
  Lpdo a = parse_operator("Dx^2 - Dy^2 + y*Dx + x*Dy + 1/2*(y^2-x^2) - 1");
  auto an = roots(a);
  GridSpec spec{-10, 10, -10, 10, 201, 201};
  GridField f = invariant_field(a, an.roots[0], spec);
  CHECK(f.source == parse_expr("1/4*(y^2 - x^2)"));
  FieldSummary s = summarize(f);
  CHECK(std::fabs(s.max_abs - 25.0) < 1e-9);
  CHECK(s.nan_count == 0);
  // The maximum sits on a coordinate axis extreme.
  CHECK(std::fabs(s.argmax_x * s.argmax_y) < 1e-12);
  CHECK(std::fabs(std::max(std::fabs(s.argmax_x), std::fabs(s.argmax_y)) - 10.0) < 1e-12);
}

TEST_CASE("invariant field of the bounded example stays bounded") {
  Lpdo b = op_b();
  auto an = roots(b);
  GridSpec spec{-10, 10, -10, 10, 201, 201};
  FieldSummary s = summarize(invariant_field(b, an.roots[0], spec));
  CHECK(s.max_abs <= 1.3);
}

TEST_CASE("damped operator has small invariant far from the axes") {
  Lpdo bt = op_b_tilde();
  auto an = roots(bt);
  GridSpec spec{10, 100, 10, 100, 200, 200};
  GridField f = invariant_field(bt, an.roots[0], spec);
  FieldSummary s = summarize(f);
  CHECK(s.max_abs >= 1e-5);
  CHECK(s.max_abs <= 2e-2);
  CHECK(std::fabs(eval(f.source, 100, 100)) < 1e-3);

  GridSpec near{1e-3, 1, 1e-3, 1, 200, 200};
  FieldSummary sn = summarize(invariant_field(bt, an.roots[0], near));
  CHECK(sn.max_abs > 10.0);
}

TEST_CASE("singular points become NaN and are counted") {
  GridSpec spec{0, 1, 0, 1, 11, 11};
  GridField f = sample(parse_expr("1/(x*y)"), spec);
  FieldSummary s = summarize(f);
  CHECK(s.nan_count == 21);  // the x = 0 row plus the y = 0 column
  CHECK(std::isnan(f.at(0, 5)));
  CHECK(!std::isnan(f.at(5, 5)));
}

TEST_CASE("coefficient deltas") {
  Lpdo b = op_b(), bt = op_b_tilde();
  GridSpec spec{10, 100, 10, 100, 50, 50};
  auto deltas = coefficient_deltas(b, bt, spec);
  CHECK(deltas.size() == 3);
  for (const auto& [key, field] : deltas) {
    double expected = eval(sub(b.coeff(key.first, key.second), bt.coeff(key.first, key.second)),
                           spec.x_at(0), spec.y_at(0));
    CHECK(field.at(0, 0) == doctest::Approx(expected));
  }
  // a10 - a10~ at (10,10) is sin(10)(1 - sin(1/100)).
  Expr d10 = sub(b.coeff(1, 0), bt.coeff(1, 0));
  CHECK(eval(d10, 10, 10) ==
        doctest::Approx(std::sin(10.0) * (1 - std::sin(0.01))).epsilon(1e-12));

  CHECK(coefficient_deltas(b, b, spec).empty());
  CHECK_THROWS_AS(coefficient_deltas(b, parse_operator("Dx^2 - Dy^2"), spec),
                  std::domain_error);
}

TEST_CASE("r function proximity check") {
  GridSpec spec{-10, 10, -10, 10, 101, 101};
  // c = d and b = 0: both sides vanish identically.
  LinearCoeffs sym;
  sym.c = {Rational(1), Rational(2), Rational(3)};
  sym.d = sym.c;
  RCheckResult trivial = r_function_check(sym, 1e-12, spec);
  CHECK(trivial.holds);
  CHECK(trivial.worst == 0.0);

  // a10 = y, a01 = x: s = (0, 1, -1), R = -1 + (y - x)^2 / 4.
  LinearCoeffs lc;
  lc.c = {Rational(0), Rational(1), Rational(0)};
  lc.d = {Rational(0), Rational(0), Rational(1)};
  auto s = lc.s();
  CHECK(s[0] == 0);
  CHECK(s[1] == 1);
  CHECK(s[2] == -1);
  RCheckResult res = r_function_check(lc, 1e-3, spec);
  // R grows quadratically while a00 = 0; worst value is at a far corner.
  CHECK_FALSE(res.holds);
  double corner = std::fabs(-1.0 + std::pow(10.0 - (-10.0), 2) / 4.0);
  CHECK(res.worst == doctest::Approx(corner));

  // No linear a00 can track the quadratic R on a large box.
  LinearCoeffs chase = lc;
  chase.b = {Rational(-1), Rational(1), Rational(-1)};
  CHECK_FALSE(r_function_check(chase, 1e-1, spec).holds);
  CHECK_THROWS_AS(r_function_check(lc, 0.0, spec), std::domain_error);
}

TEST_CASE("fields agree with direct evaluation") {
  Rng rng(0x6F1E1D);
  Expr e = parse_expr("sin(x)*y + 1/(x+y+3)");
  GridSpec spec{-1, 1, -1, 1, 21, 21};
  GridField f = sample(e, spec);
  for (int probe = 0; probe < 20; ++probe) {
    int i = static_cast<int>(rng.integer(0, spec.nx - 1));
    int j = static_cast<int>(rng.integer(0, spec.ny - 1));
    CHECK(f.at(i, j) == eval(e, spec.x_at(i), spec.y_at(j)));
  }
}

TEST_CASE("scaling is pointwise linear in f") {
  Expr f = parse_expr("sin(1/(x*y))");
  Expr a = parse_expr("cos(x)");
  GridSpec spec{10, 20, 10, 20, 11, 11};
  GridField fa = sample(mul(f, a), spec);
  GridField ff = sample(f, spec);
  GridField aa = sample(a, spec);
  for (int i = 0; i < spec.nx; ++i)
    for (int j = 0; j < spec.ny; ++j)
      CHECK(std::fabs(fa.at(i, j) - ff.at(i, j) * aa.at(i, j)) < 1e-12);
}

TEST_CASE("gauge conjugates share the invariant field") {
  Rng rng(0x6A06E);
  Lpdo a = parse_operator("Dx^2 - Dy^2 + y*Dx + x*Dy + x*y");
  Expr phi = rng.poly(1);
  Lpdo b = gauge_conjugate(a, phi);
  auto an = roots(a);
  GridSpec spec{-2, 2, -2, 2, 21, 21};
  GridField fa = invariant_field(a, an.roots[0], spec);
  GridField fb = invariant_field(b, an.roots[0], spec);
  for (int i = 0; i < spec.nx; ++i)
    for (int j = 0; j < spec.ny; ++j)
      CHECK(std::fabs(fa.at(i, j) - fb.at(i, j)) < 1e-9 * (1 + std::fabs(fa.at(i, j))));
}

TEST_CASE("grid refinement never loses the sup") {
  Expr e = parse_expr("1/4*(y^2 - x^2)");
  GridSpec coarse{-10, 10, -10, 10, 51, 51};
  GridSpec fine{-10, 10, -10, 10, 101, 101};  // contains every coarse point
  double mc = summarize(sample(e, coarse)).max_abs;
  double mf = summarize(sample(e, fine)).max_abs;
  CHECK(mf >= mc - 1e-12);
}

TEST_CASE("CSV export") {
  GridSpec spec{0, 1, 0, 1, 2, 2};
  GridField f = sample(parse_expr("1/(x*y)"), spec);
  std::string csv = to_csv(f);
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  CHECK(line == "x,y,value");
  std::getline(is, line);
  CHECK(line == "0,0,nan");
  std::getline(is, line);
  CHECK(line == "0,1,nan");
  std::getline(is, line);
  CHECK(line == "1,0,nan");
  std::getline(is, line);
  CHECK(line == "1,1,1");
  // 17 significant digits round-trip.
  GridField g = sample(parse_expr("1/3"), GridSpec{0, 1, 0, 1, 2, 2});
  std::string csv2 = to_csv(g);
  double third = 0;
  std::sscanf(csv2.c_str() + csv2.find('\n') + 1, "%*f,%*f,%lf", &third);
  CHECK(third == 1.0 / 3.0);
}

TEST_CASE("candidate ranking prefers stronger damping") {
  Lpdo b = op_b();
  auto an = roots(b);
  GridSpec spec{10, 100, 10, 100, 40, 40};
  std::vector<Expr> fs{make_int(1), parse_expr("sin(1/(x*y))")};
  auto ranked = rank_scale_candidates(b, an.roots[0], fs, {{1, 0}, {0, 1}, {0, 0}}, spec);
  REQUIRE(ranked.size() == 2);
  CHECK(ranked[0].f == parse_expr("sin(1/(x*y))"));
  CHECK(ranked[0].summary.max_abs < ranked[1].summary.max_abs);
}
