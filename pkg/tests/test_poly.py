from fractions import Fraction

import pytest
import sympy
from gmpy2 import mpq
from hypothesis import given, strategies as st

from brieskorn.linalg import rank, rref, solve
from brieskorn.poly import (QQ, UNDEFINED, NotQuasihomogeneous, ParseError, Poly, PolyRing, Underdetermined,
                            VarContext, WeightSystem, infer_weights, poly_from_json, poly_to_json)

R3 = PolyRing(("x1", "x2", "x3"), (1, 1, 1))
SYMS = sympy.symbols("x1 x2 x3")

exps = st.tuples(*[st.integers(0, 3)] * 3)
polys = st.dictionaries(exps, st.integers(-6, 6), max_size=6).map(
    lambda d: Poly(3, {e: mpq(c) for e, c in d.items() if c}))


def to_sympy(p: Poly):
    return sympy.expand(sum((sympy.Rational(int(c.numerator), int(c.denominator))
                             * sympy.prod([s ** k for s, k in zip(SYMS, e)])
                             for e, c in p.terms.items()), sympy.Integer(0)))


@given(polys, polys)
def test_arithmetic_matches_sympy(p, q):
    assert to_sympy(p + q) == sympy.expand(to_sympy(p) + to_sympy(q))
    assert to_sympy(p * q) == sympy.expand(to_sympy(p) * to_sympy(q))
    assert to_sympy(p - q) == sympy.expand(to_sympy(p) - to_sympy(q))


@given(polys)
def test_format_parse_roundtrip(p):
    assert R3.parse(R3.format(p)) == p


@given(polys)
def test_diff_matches_sympy(p):
    for i, s in enumerate(SYMS):
        assert to_sympy(p.diff(i)) == sympy.diff(to_sympy(p), s)


@given(polys)
def test_json_roundtrip(p):
    assert poly_from_json(poly_to_json(p), 3) == p


def test_parser_features():
    p = R3.parse("2*(x1 + x2)^2 - x1**2 / 2 + -3")
    assert p == R3.parse("3/2*x1^2 + 4*x1*x2 + 2*x2^2 - 3")
    assert R3.parse("x1 - x1") == Poly.zero(3)
    assert R3.format(R3.parse("x1^3 - 1/2*x2")) == "x1^3 - 1/2*x2"


@pytest.mark.parametrize("bad", ["x1 +", "y1", "x1 / x2", "(x1", "x1 ^ x2", "2 3"])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        R3.parse(bad)


def test_no_floats():
    with pytest.raises(TypeError):
        QQ(0.5)
    assert QQ(Fraction(1, 3)) == mpq(1, 3)
    assert QQ("2/6") == mpq(1, 3)


def test_degrees_and_norm():
    ring = PolyRing(("x1", "x2"), (QQ("4/5"), QQ("6/5")))
    f = ring.parse("x1^3 + x2^2")
    assert ring.degree(f) == QQ("12/5")
    assert ring.is_quasihomogeneous(f)
    assert not ring.is_quasihomogeneous(ring.parse("x1^3 + x2"))
    assert Poly.zero(2).degree((1, 1)) is UNDEFINED
    assert ring.parse("-3*x1 + 1/2").norm() == QQ("7/2")
    comps = ring.parse("x1^3 + x2^2 + x1").components(ring.weights)
    assert set(comps) == {QQ("12/5"), QQ("4/5")}


@pytest.mark.parametrize("text,w,r", [
    ("x1^3+x2^2", ("4/5", "6/5"), "12/5"),
    ("x1^2*x2+x2^3", ("1", "1"), "3"),
    ("x1^3+x2^4", ("8/7", "6/7"), "24/7"),
    ("x1^3+x1*x2^3", ("6/5", "4/5"), "18/5"),
])
def test_infer_weights(text, w, r):
    ws = infer_weights(PolyRing(("x1", "x2"), (1, 1)).parse(text), 2)
    assert ws.weights == tuple(QQ(v) for v in w)
    assert ws.r == QQ(r)


def test_infer_weights_errors():
    ring = PolyRing(("x1", "x2"), (1, 1))
    with pytest.raises(NotQuasihomogeneous):
        infer_weights(ring.parse("x1^2 + x2^2 + x1"), 2)
    with pytest.raises(Underdetermined):
        infer_weights(ring.parse("x1^2*x2"), 2)
    with pytest.raises(Underdetermined):
        infer_weights(ring.parse("x1^2"), 2)


def test_weight_system_validation():
    with pytest.raises(ValueError):
        WeightSystem((1, 2))
    with pytest.raises(ValueError):
        WeightSystem((-1, 3))
    assert WeightSystem.symmetric_weights(3).symmetric


def test_context_norm_modes():
    ctx = VarContext(WeightSystem((1, 1), 3), (3, 2))
    p = ctx.parse("x1*lam1 - 2*x2")
    with pytest.raises(ValueError):
        ctx.norm(p)
    assert ctx.norm(p, "parametric") == 3
    assert ctx.degree(p) == 4
    assert ctx.x_degree(p) == 1


def test_linalg():
    m = [[mpq(1), mpq(2)], [mpq(2), mpq(4)]]
    assert rank(m) == 1
    assert solve(m, [1, 2]) == [1, 0]
    assert solve(m, [1, 3]) is None
    rows = [[mpq(0), mpq(2), mpq(4)], [mpq(1), mpq(1), mpq(1)]]
    assert rref(rows) == [0, 1]
    assert rows == [[1, 0, -1], [0, 1, 2]]
