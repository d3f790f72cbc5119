"""Division of top-degree forms by df (quasihomogeneous) and by dF (family).

Each graded slice of the division problem

    phi = sum_j c_j phi_j + sum_i (-1)^i (df/dx_i) a_i

is a finite linear system.  Its canonical solution orders the unknowns as
(c, then eta monomials in graded-lex order), reduces to RREF and sets free
unknowns to zero.  Monomials of degree above (top basis degree + max weight)
are instead divided by peeling off one variable and dividing the cofactor,
which keeps the ratio of every such monomial equal to one already scanned by
the modulus estimate.  Solutions are computed once per monomial and reused by
linearity.
"""

from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

from .family import Family
from .forms import KForm, df as form_df, wedge
from .linalg import rref
from .local_algebra import LocalAlgebra, monomials_up_to
from .poly import Poly, VarContext, glex_key, term_degree


class DivisionError(RuntimeError):
    """The graded system had no solution: a bug or an invalid basis."""


@dataclass
class DivisionOutcome:
    c: list          # remainder coefficients (Polys, parameter-only)
    eta: KForm       # incomplete ratio
    checked: bool = False

    def ratio(self, mu: KForm, mode="parametric"):
        total = self.eta.norm(mode) + sum(p.norm() for p in self.c)
        return total / mu.norm(mode)

    def to_json(self, ctx: VarContext):
        return {"c": [ctx.format(p) for p in self.c], "eta": self.eta.to_json(),
                "checked": self.checked}


@dataclass
class ModulusEstimate:
    M_hat: mpq
    witness: tuple       # exponent of the monomial n-form achieving the max
    threshold: mpq       # largest n-form degree scanned
    ratios: dict         # exponent -> ratio, for audit

    def to_json(self, la: LocalAlgebra):
        ring = la.ring()
        return {"M_hat": str(self.M_hat), "witness": ring.monomial_text(self.witness),
                "threshold": str(self.threshold), "note": "upper-bound surrogate for M(f) "
                "computed with the canonical basis and canonical division"}


class Divider:
    """Per-slice solution operators for division by df."""

    def __init__(self, la: LocalAlgebra):
        self.la = la
        self.n = la.n
        self.partials = [la.f.diff(i) for i in range(self.n)]
        self.basis_pos = {e: j for j, e in enumerate(la.basis)}
        self._solutions = {}
        self._slices_done = set()
        # above this coefficient degree solutions come from monomial extension
        self.extension_degree = max(la.degrees) + la.weights.max_weight

    def _solve_slice(self, deg):
        la, n = self.la, self.n
        w = la.weights.weights
        r = la.r
        grouped = monomials_up_to(w, deg)
        rows_mons = sorted(grouped.get(deg, []), key=glex_key)
        row_of = {e: k for k, e in enumerate(rows_mons)}
        unknowns = [("c", j) for j, e in enumerate(la.basis) if la.degrees[j] == deg]
        eta_unknowns = []
        for i in range(n):
            for gam in grouped.get(deg - (r - w[i]), []):
                eta_unknowns.append((i, gam))
        eta_unknowns.sort(key=lambda t: (glex_key(t[1]), t[0]))
        unknowns += [("eta",) + u for u in eta_unknowns]
        nu, nr = len(unknowns), len(rows_mons)
        mat = [[mpq(0)] * (nu + nr) for _ in range(nr)]
        for k in range(nr):
            mat[k][nu + k] = mpq(1)
        for col, u in enumerate(unknowns):
            if u[0] == "c":
                mat[row_of[la.basis[u[1]]]][col] += 1
            else:
                i, gam = u[1], u[2]
                sign = -1 if i % 2 else 1
                for e, c in self.partials[i].terms.items():
                    mat[row_of[tuple(a + b for a, b in zip(e, gam))]][col] += sign * c
        piv = rref(mat, nu)
        for k in range(len(piv), nr):
            if any(mat[k][nu:]):
                raise DivisionError(f"slice {deg}: graded division system is inconsistent")
        for m_idx, mon in enumerate(rows_mons):
            cs, etas = [], []
            for k, col in enumerate(piv):
                v = mat[k][nu + m_idx]
                if v:
                    u = unknowns[col]
                    if u[0] == "c":
                        cs.append((u[1], v))
                    else:
                        etas.append(((u[1], u[2]), v))
            self._solutions[mon] = (cs, etas)
        self._slices_done.add(deg)

    def solution(self, alpha):
        """Canonical (c, eta) for the monomial n-form x^alpha dx_1^...^dx_n."""
        alpha = tuple(alpha)
        sol = self._solutions.get(alpha)
        if sol is not None:
            return sol
        deg = term_degree(alpha, self.la.weights.weights)
        if deg > self.extension_degree:
            # x^alpha = x_j x^(alpha - e_j) with the cofactor still above every
            # basis degree: divide it and multiply the ratio by x_j (same norm)
            j = next(k for k, a in enumerate(alpha) if a)
            lower = alpha[:j] + (alpha[j] - 1,) + alpha[j + 1:]
            cs, etas = self.solution(lower)
            if cs:
                raise DivisionError("remainder above the top basis degree")
            bump = lambda g: g[:j] + (g[j] + 1,) + g[j + 1:]
            sol = ([], [((i, bump(g)), v) for (i, g), v in etas])
            self._solutions[alpha] = sol
            return sol
        self._solve_slice(deg)
        return self._solutions[alpha]

    def divide(self, mu: KForm, check=True) -> DivisionOutcome:
        ctx = mu.ctx
        n, nv = self.n, ctx.nvars
        if mu.k != n:
            raise ValueError("division by df is defined for top-degree forms")
        l = self.la.l
        c_acc = [dict() for _ in range(l)]
        eta_acc = [dict() for _ in range(n)]
        pad = (0,) * n
        for e, coef in mu.top_coefficient().terms.items():
            alpha, beta = e[:n], e[n:]
            cs, etas = self.solution(alpha)
            lam_e = pad + beta
            for j, v in cs:
                acc = c_acc[j]
                acc[lam_e] = acc.get(lam_e, 0) + coef * v
            for (i, gam), v in etas:
                key = tuple(gam) + beta
                acc = eta_acc[i]
                acc[key] = acc.get(key, 0) + coef * v
        c = [Poly(nv, acc) for acc in c_acc]
        eta = KForm.zero(ctx, n - 1)
        for i in range(n):
            p = Poly(nv, eta_acc[i])
            if p:
                eta = eta + KForm.hat(ctx, i, p)
        out = DivisionOutcome(c=c, eta=eta)
        if check:
            recon = wedge(form_df(ctx, ctx.embed(self.la.f)), eta)
            for j, cj in enumerate(c):
                if cj:
                    recon = recon + KForm.volume(ctx, cj * Poly.monomial(tuple(self.la.basis[j]) + (0,) * (nv - n)))
            if recon != mu:
                raise DivisionError("reconstruction mu = sum c_i mu_i + df ^ eta failed")
            out.checked = True
        return out


def get_divider(la: LocalAlgebra) -> Divider:
    d = la.__dict__.get("_divider")
    if d is None:
        d = Divider(la)
        la.__dict__["_divider"] = d
    return d


def divide_by_df(mu: KForm, la: LocalAlgebra, check=True) -> DivisionOutcome:
    """mu = sum c_i mu_i + df ^ eta with the canonical graded solution."""
    return get_divider(la).divide(mu, check=check)


def division_modulus(la: LocalAlgebra) -> ModulusEstimate:
    """max (|eta| + sum|c_i|) over monomial n-forms of degree <= D* + max w_i."""
    w = la.weights.weights
    n = la.n
    threshold = la.max_form_degree + la.weights.max_weight
    div = get_divider(la)
    best, witness, ratios = mpq(-1), None, {}
    groups = monomials_up_to(w, threshold - n)
    for deg in sorted(groups):
        for alpha in sorted(groups[deg], key=glex_key):
            cs, etas = div.solution(alpha)
            ratio = sum((abs(v) for _, v in cs), mpq(0)) + sum((abs(v) for _, v in etas), mpq(0))
            ratios[alpha] = ratio
            if ratio > best:
                best, witness = ratio, alpha
    return ModulusEstimate(M_hat=best, witness=witness, threshold=threshold, ratios=ratios)


# --------------------------------------------------------------------------
# nonhomogeneous division by dF


def _dF_monomial(family: Family, alpha):
    """Divide x^alpha dx_1^...^dx_n by dF; result cached on the family."""
    key = ("dF", tuple(alpha))
    cache = family._cache
    if key in cache:
        return cache[key]
    ctx = family.ctx
    n = family.n
    div = get_divider(family.la)
    mu = KForm.volume(ctx, Poly.monomial(tuple(alpha) + (0,) * family.m))
    c_tot = [Poly.zero(ctx.nvars) for _ in range(family.l)]
    eta_tot = KForm.zero(ctx, n - 1)
    rest = mu
    rounds = 0
    last_xdeg = None
    while rest:
        xdeg = rest.x_degree()
        if last_xdeg is not None and not xdeg < last_xdeg:
            raise DivisionError("x-degree failed to decrease in division by dF")
        last_xdeg = xdeg
        out = div.divide(rest, check=False)
        c_tot = [a + b for a, b in zip(c_tot, out.c)]
        eta_tot = eta_tot + out.eta
        rest = -wedge(family.dh, out.eta)
        rounds += 1
    cache[key] = (c_tot, eta_tot, rounds)
    return cache[key]


def divide_by_dF(mu: KForm, family: Family, check=True) -> DivisionOutcome:
    """mu = sum c_i(lam) mu_i + dF ^ eta with parameter-polynomial c_i, eta."""
    ctx = family.ctx
    if mu.ctx.nvars != ctx.nvars:
        mu = mu.with_ctx(ctx)
    n, nv = family.n, ctx.nvars
    c = [Poly.zero(nv) for _ in range(family.l)]
    eta = KForm.zero(ctx, n - 1)
    by_alpha = {}
    for e, coef in mu.top_coefficient().terms.items():
        by_alpha.setdefault(e[:n], {})[(0,) * n + e[n:]] = coef
    for alpha, lam_terms in by_alpha.items():
        weight = Poly(nv, lam_terms, _clean=True)
        ca, ea, _ = _dF_monomial(family, alpha)
        c = [a + weight * b for a, b in zip(c, ca)]
        eta = eta + ea * weight
    out = DivisionOutcome(c=c, eta=eta)
    if check:
        recon = wedge(family.dF, eta)
        for j, cj in enumerate(c):
            if cj:
                recon = recon + family.mu(j) * cj
        if recon != mu:
            raise DivisionError("reconstruction mu = sum c_i mu_i + dF ^ eta failed")
        out.checked = True
    return out


def prop_bound(k, r, n, M):
    """k r^(n(k-r)) M^k for symmetric weights (integer k)."""
    k = int(k)
    r = int(r)
    return k * mpq(r) ** (n * (k - r)) * mpq(M) ** k
