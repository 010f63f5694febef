"""Smoke tests for the lpdofactor extension module."""

import math

import pytest

import lpdofactor as lf


def test_parse_and_print_roundtrip():
    op = lf.parse_operator("Dx*Dy + x*Dx + 1")
    assert str(op) == "Dx*Dy + x*Dx + 1"
    assert op.order() == 2
    assert lf.parse_operator(str(op)) == op


def test_expr_arithmetic_and_eval():
    e = lf.parse_expr("1/4*(y^2 - x^2)")
    assert e.eval(0.0, 10.0) == pytest.approx(25.0)
    d = e.diff("x")
    assert str(d) == "-1/2*x"
    assert (e - e).is_zero()
    assert e.zero_verdict() == "proven-nonzero"


def test_parameters_and_substitution():
    c = lf.param("C", "y")
    expr = lf.parse_expr("1/(x+C)", depends={"C": "y"})
    assert str(expr.diff("x")) == "-1/(x + C)^2"
    assert str(c) == "C"
    one = lf.parse_expr("1")
    assert str(expr.subs("C", one)) == "1/(x + 1)"


def test_factorization_chain():
    fact = lf.parse_operator("Dx^2 - Dy^2 + y*Dx + x*Dy + 1/4*(y^2-x^2) - 1")
    result = lf.full_factorization(fact)
    assert len(result["chains"]) == 1
    factors = result["chains"][0]["factors"]
    assert factors == ["Dx - Dy + 1/2*x + 1/2*y", "Dx + Dy - 1/2*x + 1/2*y"]


def test_laplace_and_gauge():
    a1 = lf.parse_operator("Dx*Dy + x*Dx + 1")
    ahat, bhat = lf.laplace_invariants(a1)
    assert str(ahat) == "0"
    assert str(bhat) == "1"
    a2 = a1.gauge(lf.parse_expr("x"))
    assert str(a2) == "Dx*Dy + x*Dx + Dy + x + 1"


def test_transpose_involution():
    op = lf.parse_operator("Dx^2 - Dy^2 + y*Dx + x*Dy + 1/4*(y^2-x^2) - 1")
    assert op.transpose().transpose() == op


def test_riccati_flow():
    landau = lf.parse_operator("Dx^3 + x*Dx^2*Dy + 2*Dx^2 + (2*x+2)*Dx*Dy + Dx + (2+x)*Dy")
    info = lf.roots(landau)
    assert info["unresolved"] == 0
    double = [r for r in info["roots"] if r.multiplicity == 2][0]
    rep = lf.riccati_obstruction(landau, double)
    assert rep["status"] == "riccati-required"
    assert rep["riccati"] == "-2*r + d/dx(r) + r^2 + 1"
    cand = lf.parse_expr("1 + 1/(x+C)", depends={"C": "y"})
    ver = lf.verify_riccati(landau, double, cand)
    assert ver["status"] == "factored"


def test_grid_sampling():
    spec = lf.GridSpec(-10, 10, -10, 10, 201, 201)
    out = lf.sample(lf.parse_expr("1/4*(y^2 - x^2)"), spec)
    assert out["summary"]["max_abs"] == pytest.approx(25.0)
    assert out["summary"]["nan_count"] == 0
    assert len(out["values"]) == 201


def test_invariant_field_and_scaling():
    b = lf.parse_operator(
        "Dx^2 - Dy^2 + sin(y)*Dx + cos(x)*Dy + 1/2*(sin(y)^2 - cos(x)^2)"
    )
    bt = lf.scale_operator(b, lf.parse_expr("sin(1/(x*y))"), [(1, 0), (0, 1), (0, 0)])
    spec = lf.GridSpec(10, 100, 10, 100, 60, 60)
    field = lf.invariant_field(bt, "1", spec)
    assert 1e-6 < field["summary"]["max_abs"] < 2e-2


def test_r_function_check():
    res = lf.r_function_check([0, 0, 0], [1, 2, 3], [1, 2, 3], eps=1e-9)
    assert res["holds"]
    assert res["worst"] == 0.0
    res2 = lf.r_function_check([0, 0, 0], [0, 1, 0], [0, 0, 1], eps=1e-3)
    assert not res2["holds"]


def test_eval_domain_error():
    with pytest.raises(Exception):
        lf.parse_expr("ln(x)").eval(-1.0, 0.0)
    assert math.isnan(
        lf.sample(lf.parse_expr("1/(x*y)"), lf.GridSpec(0, 1, 0, 1, 2, 2))["values"][0][0]
    )
