import random

import sympy
from gmpy2 import mpq
from hypothesis import given, strategies as st

from brieskorn import polymat
from brieskorn.poly import Poly

NAMES = ("a", "b", "c")
FCTX = polymat.flint_context(NAMES)
POS = [0, 1, 2]
SYMS = sympy.symbols(NAMES)


def rand_entry(rng):
    terms = {}
    for _ in range(rng.randint(0, 3)):
        terms[tuple(rng.randint(0, 2) for _ in range(3))] = mpq(rng.randint(-3, 3), rng.choice([1, 2]))
    return Poly(3, terms)


def rand_matrix(seed, n):
    rng = random.Random(seed)
    return [[rand_entry(rng) for _ in range(n)] for _ in range(n)]


def to_sympy(p: Poly):
    return sum((sympy.Rational(int(c.numerator), int(c.denominator))
                * sympy.prod([s ** k for s, k in zip(SYMS, e)]) for e, c in p.terms.items()), sympy.Integer(0))


@given(st.integers(0, 10 ** 6), st.integers(1, 4))
def test_det_matches_bareiss_and_sympy(seed, n):
    M = rand_matrix(seed, n)
    F = [[polymat.to_flint(e, FCTX, POS) for e in row] for row in M]
    d = polymat.det(F)
    assert d == polymat.det_bareiss(F)
    ref = sympy.expand(sympy.Matrix([[to_sympy(e) for e in row] for row in M]).det())
    assert sympy.expand(to_sympy(polymat.from_flint(d, 3, POS)) - ref) == 0


@given(st.integers(0, 10 ** 6), st.integers(2, 4))
def test_adjugate_identity(seed, n):
    F = [[polymat.to_flint(e, FCTX, POS) for e in row] for row in rand_matrix(seed, n)]
    d = polymat.det(F)
    prod = polymat.matmul(F, polymat.adjugate(F))
    for i in range(n):
        for j in range(n):
            assert prod[i][j] == (d if i == j else d - d)


def test_charpoly_of_companion():
    # companion matrix of t^3 - 2t + 5
    one = FCTX.from_dict({(0, 0, 0): 1})
    z = one - one
    M = [[z, z, -5 * one], [one, z, 2 * one], [z, one, z]]
    assert polymat.charpoly(M) == [one, z, -2 * one, 5 * one]


def test_divides_and_roundtrip():
    a = polymat.to_flint(Poly(3, {(1, 0, 0): mpq(1), (0, 1, 0): mpq(1, 2)}), FCTX, POS)
    b = polymat.to_flint(Poly(3, {(0, 0, 2): mpq(3)}), FCTX, POS)
    assert polymat.divides(a, a * b)
    assert not polymat.divides(a, b)
    assert polymat.divides(a, a - a)
    p = Poly(3, {(2, 0, 1): mpq(-7, 3)})
    assert polymat.from_flint(polymat.to_flint(p, FCTX, POS), 3, POS) == p
