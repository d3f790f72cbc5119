import random
from itertools import combinations

import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from brieskorn.forms import (FormError, KForm, ext_d, format_form, from_json, interior_euler, invert_euler,
                             lie_euler, parse_form, primitive, to_json, wedge)
from brieskorn.poly import Poly, VarContext, WeightSystem

CTX3 = VarContext(WeightSystem((1, 1, 1)), (2,))
CTXW = VarContext(WeightSystem((mpq(4, 5), mpq(6, 5))), (mpq(1, 5),))


def rand_form(seed, ctx, k, lam=True):
    rng = random.Random(seed)
    n = ctx.n
    coeffs = {}
    for idx in rng.sample(list(combinations(range(n), k)), rng.randint(0, len(list(combinations(range(n), k))))):
        terms = {}
        for _ in range(rng.randint(1, 3)):
            e = [rng.randint(0, 3) for _ in range(n)] + [rng.randint(0, 1) if lam else 0]
            terms[tuple(e)] = mpq(rng.randint(-4, 4), rng.choice([1, 2, 3]))
        coeffs[idx] = Poly(ctx.nvars, terms)
    return KForm(ctx, k, coeffs)


seeds = st.integers(0, 10 ** 6)


@given(seeds, st.integers(0, 1))
def test_d_squared_zero(seed, k):
    assert ext_d(ext_d(rand_form(seed, CTX3, k))).is_zero()


@given(seeds, st.integers(0, 3), st.integers(0, 3))
def test_leibniz_and_graded_commutativity(seed, k1, k2):
    if k1 + k2 > 3:
        return
    a = rand_form(seed, CTX3, k1)
    b = rand_form(seed + 1, CTX3, k2)
    sign = -1 if k1 * k2 % 2 else 1
    assert wedge(a, b) == wedge(b, a) * sign
    if k1 + k2 < 3:
        lhs = ext_d(wedge(a, b))
        rhs = wedge(ext_d(a), b) + wedge(a, ext_d(b)) * (-1 if k1 % 2 else 1)
        assert lhs == rhs


@given(seeds, st.integers(1, 2))
def test_cartan_identity(seed, k):
    # L_X = d i_X + i_X d on x-monomial forms (parameters are passive)
    for ctx in (CTX3, CTXW):
        if k > ctx.n:
            continue
        a = rand_form(seed, ctx, k)
        lhs = lie_euler(a)
        rhs = ext_d(interior_euler(a))
        if k < ctx.n:
            rhs = rhs + interior_euler(ext_d(a))
        assert lhs == rhs


@given(seeds, st.integers(1, 3))
def test_primitive_inverts_d(seed, k):
    b = rand_form(seed, CTX3, k - 1)
    a = ext_d(b)
    if not a:
        return
    p = primitive(a)
    assert ext_d(p) == a
    assert p.k == k - 1


def test_primitive_top_form_weighted():
    vol = KForm.volume(CTXW)
    p = primitive(vol)
    assert ext_d(p) == vol
    # i_X(vol)/2 with weights (4/5, 6/5)
    assert p == parse_form("dx2: 2/5*x1; dx1: -3/5*x2", CTXW)


def test_primitive_refuses_non_closed():
    with pytest.raises(FormError):
        primitive(parse_form("dx1: x2", CTX3))
    with pytest.raises(FormError):
        primitive(KForm.function(CTX3, Poly.const(1, CTX3.nvars)))


def test_invert_euler():
    mu = parse_form("dx1^dx2: x1^2 + x2", CTXW)
    inv = invert_euler(mu, "inverse_X")
    assert lie_euler(inv) == mu
    r = mpq(12, 5)
    sh = invert_euler(mu, "inverse_shifted", r)
    assert lie_euler(sh) * (1 / r) + sh == mu


def test_parse_format_json_roundtrip():
    a = parse_form("dx1^dx3: x1*lam1 - 1/2; dx2^dx3: x3^2", CTX3)
    assert parse_form(format_form(a), CTX3) == a
    assert from_json(to_json(a), CTX3) == a
    assert parse_form("dx2^dx1: 1", CTX3) == parse_form("dx1^dx2: -1", CTX3)
    assert parse_form("dx1^dx1: 1", CTX3).is_zero()


@pytest.mark.parametrize("bad", ["dx4: 1", "x1", "dy1: 2", "dx1: 1; dx1^dx2: 1"])
def test_parse_form_errors(bad):
    with pytest.raises((FormError, ValueError)):
        parse_form(bad, CTX3)


def test_degrees_and_norms():
    a = parse_form("dx1: x2^2 - 3*x1*lam1", CTXW)
    assert a.degree() == mpq(16, 5)
    assert a.x_degree() == mpq(16, 5)
    assert not a.is_quasihomogeneous()
    assert set(a.components()) == {mpq(16, 5), mpq(9, 5)}
    with pytest.raises(ValueError):
        a.norm()
    assert a.norm("parametric") == 4
    assert not a.is_lambda_free()
    assert a.subs({2: mpq(0)}).is_lambda_free()
