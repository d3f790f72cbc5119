"""Polynomial matrices over Q[lam] backed by FLINT multivariate polynomials.

Used for the determinant, adjugate, gcd and exact-divisibility questions of
the pole analysis, which are far too heavy for the pure-Python Poly.
"""

from __future__ import annotations

import flint
from flint.utils.flint_exceptions import DomainError
from gmpy2 import mpq

from .poly import Poly


def flint_context(names):
    return flint.fmpq_mpoly_ctx.get(tuple(names), "deglex")


def to_flint(p: Poly, fctx, positions):
    """positions[k] = index in the Poly exponent of flint variable k."""
    data = {}
    for e, c in p.terms.items():
        key = tuple(e[i] for i in positions)
        data[key] = flint.fmpq(int(c.numerator), int(c.denominator))
    return fctx.from_dict(data)


def from_flint(q, nvars, positions) -> Poly:
    terms = {}
    for key, c in q.to_dict().items():
        e = [0] * nvars
        for k, v in zip(positions, key):
            e[k] = int(v)
        terms[tuple(e)] = mpq(int(c.p), int(c.q))
    return Poly(nvars, terms)


def _zero_one(mat):
    fctx = mat[0][0].context()
    return fctx.from_dict({}), fctx.from_dict({(0,) * fctx.nvars(): 1})


def charpoly(mat):
    """Coefficients c_0..c_n of det(t*1 - A) = sum c_k t^(n-k), by Berkowitz's
    division-free algorithm (no exact divisions, unlike Bareiss)."""
    n = len(mat)
    if n == 0:
        raise ValueError("empty matrix")
    zero, one = _zero_one(mat)
    vect = [one, -mat[0][0]]
    for r in range(1, n):
        row = mat[r][:r]
        v = [mat[i][r] for i in range(r)]
        # first column of the Toeplitz factor: 1, -a_rr, -R C, -R A C, ...
        col = [one, -mat[r][r]]
        for _ in range(r):
            acc = zero
            for i in range(r):
                acc += row[i] * v[i]
            col.append(-acc)
            v = [sum((mat[i][j] * v[j] for j in range(r)), zero) for i in range(r)]
        new = []
        for i in range(r + 2):
            acc = zero
            for j in range(min(i, r) + 1):
                acc += col[i - j] * vect[j]
            new.append(acc)
        vect = new
    return vect


def det(mat):
    c = charpoly(mat)
    return c[-1] if len(mat) % 2 == 0 else -c[-1]


def det_bareiss(mat):
    """Fraction-free Bareiss elimination with exact divisions."""
    n = len(mat)
    if n == 0:
        raise ValueError("empty matrix")
    a = [list(row) for row in mat]
    fctx = a[0][0].context()
    one = fctx.from_dict({(0,) * fctx.nvars(): 1})
    prev = one
    sign = 1
    for k in range(n - 1):
        if a[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not a[i][k].is_zero()), None)
            if swap is None:
                return fctx.from_dict({})
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev
        prev = a[k][k]
    return a[n - 1][n - 1] if sign > 0 else -a[n - 1][n - 1]


def minor(mat, i, j):
    return [row[:j] + row[j + 1:] for k, row in enumerate(mat) if k != i]


def adjugate(mat):
    n = len(mat)
    if n == 1:
        fctx = mat[0][0].context()
        return [[fctx.from_dict({(0,) * fctx.nvars(): 1})]]
    adj = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            d = det(minor(mat, i, j))
            adj[j][i] = d if (i + j) % 2 == 0 else -d
    return adj


def matmul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = a[i][0] * b[0][j]
            for t in range(1, k):
                acc = acc + a[i][t] * b[t][j]
            row.append(acc)
        out.append(row)
    return out


def divides(d, p) -> bool:
    """Exact test d | p."""
    if p.is_zero():
        return True
    try:
        p / d
    except DomainError:
        return False
    return True
