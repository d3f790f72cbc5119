"""General semiquasihomogeneous family F = f + sum_s lam_s f_s."""

from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpq

from .forms import KForm, df, primitive
from .local_algebra import LocalAlgebra, analyze, monomials_up_to
from .poly import Poly, PolyRing, VarContext, WeightSystem, glex_key, infer_weights, term_degree, x_names


def lower_monomials(weights: WeightSystem):
    """Monic monomials of weighted degree < r ordered by degree then graded-lex
    (the constant monomial first)."""
    r = weights.r
    groups = monomials_up_to(weights.weights, r)
    out = []
    for deg in sorted(groups):
        if deg < r:
            out.extend(sorted(groups[deg], key=glex_key))
    return out


@dataclass
class Family:
    """Principal part f, its local algebra and the parameter context."""

    f: Poly
    la: LocalAlgebra
    monomials: list
    ctx: VarContext
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def weights(self):
        return self.la.weights

    @property
    def n(self):
        return self.la.n

    @property
    def m(self):
        return len(self.monomials)

    @property
    def l(self):
        return self.la.l

    @property
    def r(self):
        return self.la.r

    @property
    def lam_degrees(self):
        return self.ctx.lam_weights

    def monomial_degree(self, s):
        return term_degree(self.monomials[s], self.weights.weights)

    def f_s(self, s) -> Poly:
        """The monomial f_s lifted into the family ring."""
        e = tuple(self.monomials[s]) + (0,) * self.m
        return Poly.monomial(e)

    @property
    def f_lifted(self) -> Poly:
        return self._memo("f", lambda: self.ctx.embed(self.f))

    @property
    def h(self) -> Poly:
        def build():
            h = Poly.zero(self.ctx.nvars)
            for s in range(self.m):
                h = h + self.ctx.lam(s) * self.f_s(s)
            return h
        return self._memo("h", build)

    @property
    def F(self) -> Poly:
        return self._memo("F", lambda: self.f_lifted + self.h)

    @property
    def df(self) -> KForm:
        return self._memo("df", lambda: df(self.ctx, self.f_lifted))

    @property
    def dh(self) -> KForm:
        return self._memo("dh", lambda: df(self.ctx, self.h))

    @property
    def dF(self) -> KForm:
        return self._memo("dF", lambda: df(self.ctx, self.F))

    def mu(self, i) -> KForm:
        """Basis n-form phi_i dx_1^...^dx_n."""
        e = tuple(self.la.basis[i]) + (0,) * self.m
        return KForm.volume(self.ctx, Poly.monomial(e))

    def omega(self, i) -> KForm:
        """Canonical Euler-homotopy primitive of mu_i."""
        return self._memo(("omega", i), lambda: primitive(self.mu(i)))

    def _memo(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    def lam_index(self, s):
        return self.n + s

    def x_ring(self):
        return PolyRing(x_names(self.n), self.weights.weights)

    def monomial_texts(self):
        ring = self.x_ring()
        return [ring.monomial_text(e) for e in self.monomials]

    def specialize(self, values):
        """Substitution map {ring index: value} from a parameter vector."""
        if len(values) != self.m:
            raise ValueError(f"expected {self.m} parameter values, got {len(values)}")
        return {self.n + s: v for s, v in enumerate(values)}


def make_family(f: Poly, weights: WeightSystem | None = None, *, order=None,
                with_parameters=True) -> Family:
    """Build the general family with fixed principal part ``f``.

    ``order`` optionally permutes the non-constant monomials (a list of
    indices into the canonical order, which must keep index 0 first).
    ``with_parameters=False`` gives the parameter-free family F = f.
    """
    n = f.nvars
    if weights is None:
        weights = infer_weights(f, n)
    la = analyze(f, weights)
    weights = la.weights
    mons = lower_monomials(weights) if with_parameters else []
    if order is not None:
        if sorted(order) != list(range(len(mons))) or order[0] != 0:
            raise ValueError("order must be a permutation of the monomials starting with the constant")
        mons = [mons[i] for i in order]
    lam_w = tuple(weights.r - term_degree(e, weights.weights) for e in mons)
    ctx = VarContext(weights, lam_w)
    return Family(f=f, la=la, monomials=mons, ctx=ctx)


def x_context(la: LocalAlgebra) -> VarContext:
    return VarContext(la.weights)
