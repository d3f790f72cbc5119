"""Monomial basis of the local algebra C[x]/<df> of a quasihomogeneous f."""

from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpq

from .linalg import rref
from .poly import Poly, WeightSystem, glex_key, term_degree, x_names, PolyRing


class NonIsolatedSingularity(ValueError):
    pass


def monomials_up_to(weights, bound):
    """All exponent vectors with weighted degree <= bound, grouped by degree."""
    n = len(weights)
    out = {}

    def rec(i, exp, deg):
        if i == n:
            out.setdefault(deg, []).append(tuple(exp))
            return
        k = 0
        d = deg
        while d <= bound:
            exp.append(k)
            rec(i + 1, exp, d)
            exp.pop()
            k += 1
            d = deg + k * weights[i]

    rec(0, [], mpq(0))
    return out


def monomials_of_degree(weights, degree):
    return monomials_up_to(weights, degree).get(mpq(degree), [])


@dataclass
class LocalAlgebra:
    f: Poly
    weights: WeightSystem
    basis: list
    degrees: list
    slices: dict = field(repr=False, default_factory=dict)

    @property
    def n(self):
        return self.weights.n

    @property
    def r(self):
        return self.weights.r

    @property
    def l(self):
        return len(self.basis)

    @property
    def rho(self):
        return max(self.degrees) - min(self.degrees)

    @property
    def max_form_degree(self):
        """max deg mu_i, the volume form weighing n."""
        return max(self.degrees) + self.n

    @property
    def top_degree(self):
        """Weighted degree of the socle: sum(r - 2 w_i)."""
        return sum(self.r - 2 * w for w in self.weights.weights)

    def ring(self):
        return PolyRing(x_names(self.n), self.weights.weights)

    def basis_text(self):
        ring = self.ring()
        return [ring.monomial_text(e) for e in self.basis]

    def index_of(self, exp):
        return self.basis.index(tuple(exp))

    def to_json(self):
        return {
            "f": self.ring().format(self.f),
            "weights": [str(w) for w in self.weights.weights],
            "r": str(self.r),
            "l": self.l,
            "rho": str(self.rho),
            "basis": self.basis_text(),
            "degrees": [str(d) for d in self.degrees],
        }


def milnor_product(weights: WeightSystem):
    """prod_i (r - w_i)/w_i, the Milnor number of an isolated quasihomogeneous
    singularity."""
    p = mpq(1)
    for w in weights.weights:
        p *= (weights.r - w) / w
    return p


def analyze(f: Poly, weights: WeightSystem) -> LocalAlgebra:
    n = weights.n
    if f.nvars != n:
        raise ValueError("analyze expects a polynomial in the x-variables only")
    if f.is_zero() or not f.is_quasihomogeneous(weights.weights):
        raise ValueError("f is not quasihomogeneous for the given weights")
    r = f.degree(weights.weights)
    if weights.r is not None and weights.r != r:
        raise ValueError(f"weights carry r={weights.r} but deg f = {r}")
    weights = weights.with_r(r)
    expected = milnor_product(weights)
    if expected.denominator != 1:
        raise NonIsolatedSingularity(f"non-isolated singularity: product formula gives {expected}")
    partials = [f.diff(i) for i in range(n)]
    if any(p.is_zero() for p in partials):
        raise NonIsolatedSingularity("non-isolated singularity: a partial derivative vanishes")
    top = sum(r - 2 * w for w in weights.weights)
    bound = max(top, mpq(0)) + weights.max_weight
    by_degree = monomials_up_to(weights.weights, bound)

    basis, degrees, slices = [], [], {}
    for deg in sorted(by_degree):
        cols = sorted(by_degree[deg], key=glex_key, reverse=True)
        col_of = {e: j for j, e in enumerate(cols)}
        rows = []
        for i, g in enumerate(partials):
            gdeg = r - weights.weights[i]
            for gam in by_degree.get(deg - gdeg, []):
                row = [mpq(0)] * len(cols)
                for e, c in g.terms.items():
                    row[col_of[tuple(a + b for a, b in zip(e, gam))]] += c
                rows.append(row)
        pivots = rref(rows, len(cols)) if rows else []
        free = [cols[j] for j in range(len(cols)) if j not in set(pivots)]
        free.sort(key=glex_key)
        slices[deg] = {"monomials": cols, "rank": len(pivots), "quotient": free}
        if deg > top and free:
            raise NonIsolatedSingularity(
                f"non-isolated singularity: degree-{deg} slice does not lie in the gradient ideal")
        for e in free:
            basis.append(e)
            degrees.append(deg)
    if len(basis) != expected:
        raise NonIsolatedSingularity(
            f"non-isolated singularity: slice count {len(basis)} != product formula {expected}")
    return LocalAlgebra(f=f, weights=weights, basis=basis, degrees=degrees, slices=slices)


# --------------------------------------------------------------------------
# ADE table for n = 2


@dataclass(frozen=True)
class Classification:
    tag: str
    rho: mpq
    r: mpq

    @property
    def rho_below_r(self):
        return self.rho < self.r

    def to_json(self):
        return {"tag": self.tag, "rho": str(self.rho), "r": str(self.r), "rho_below_r": self.rho_below_r}


def _pattern(f: Poly):
    if any(c != 1 for c in f.terms.values()):
        return None
    return frozenset(f.terms)


def _simple_tag(exps):
    if len(exps) != 2:
        return None
    for swap in (False, True):
        es = {(e[1], e[0]) if swap else e for e in exps}
        # A_k: x1^(k+1) + x2^2
        for e in es:
            other = next(iter(es - {e}))
            if e[1] == 0 and e[0] >= 2 and other == (0, 2):
                return f"A{e[0] - 1}"
        # D_k: x1^2 x2 + x2^(k-1)
        if (2, 1) in es:
            other = next(iter(es - {(2, 1)}))
            if other[0] == 0 and other[1] >= 3:
                return f"D{other[1] + 1}"
        if es == {(3, 0), (0, 4)}:
            return "E6"
        if es == {(3, 0), (1, 3)}:
            return "E7"
        if es == {(3, 0), (0, 5)}:
            return "E8"
    return None


def classify_simple(la: LocalAlgebra) -> Classification:
    """Match the normal forms of the simple bivariate singularities and report
    whether the spread rho stays below r.  For n != 2 the tag is
    'unavailable' but the rho-vs-r verdict is still computed."""
    if la.n != 2:
        return Classification("unavailable", la.rho, la.r)
    pat = _pattern(la.f)
    tag = _simple_tag(pat) if pat is not None else None
    return Classification(tag or "not_simple", la.rho, la.r)
