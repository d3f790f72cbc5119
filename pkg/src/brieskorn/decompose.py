"""Division by f in the Brieskorn module and the inductive Brieskorn / Petrov
decompositions over a semiquasihomogeneous family.

Both decompositions are Q[lam]-linear, so they are computed once per
parameter-free monomial form and cached on the family; a general form is
decomposed by linear combination of the cached results.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

from gmpy2 import mpq

from .division import divide_by_df, get_divider
from .family import Family
from .forms import KForm, FormError, df as form_df, ext_d, interior_euler, invert_euler, primitive, wedge
from .poly import QQ, UNDEFINED, Poly


class DecompositionError(RuntimeError):
    pass


# --------------------------------------------------------------------------
# division by f


@dataclass
class EulerDivision:
    variant: int
    eta: KForm
    mu: KForm | None = None
    xi: KForm | None = None
    omega: KForm | None = None
    xi_prime: KForm | None = None

    def norm_bound(self):
        """(n+3) deg(eta) |eta|"""
        if self.eta.is_zero():
            return mpq(0)
        return (self.eta.ctx.n + 3) * self.eta.degree() * self.eta.norm("parametric")

    def variant2_norm(self):
        return self.omega.norm("parametric") + self.xi_prime.norm("parametric")


def euler_divide(eta: KForm, f: Poly, variant: int = 2, r=None, check=True) -> EulerDivision:
    """Write df^eta as f*mu + df^d(xi) (variant 1) or d(f*omega) + df^d(xi')
    (variant 2), for quasihomogeneous f of x-degree r."""
    ctx = eta.ctx
    n = ctx.n
    if eta.k != n - 1:
        raise FormError("euler_divide expects an (n-1)-form")
    if n < 2:
        raise FormError("euler_divide needs n >= 2")
    f = ctx.embed(f)
    if r is None:
        if not f.is_quasihomogeneous(ctx.x_weights):
            raise ValueError("f must be quasihomogeneous")
        r = ctx.x_degree(f)
    r = QQ(r)
    deta = ext_d(eta)
    dfm = form_df(ctx, f)
    if variant == 1:
        mu = invert_euler(deta, "inverse_X") * r
        xi = primitive(eta - interior_euler(mu) * (1 / r)) if n >= 2 else None
        out = EulerDivision(1, eta, mu=mu, xi=xi)
        if check and wedge(dfm, eta) != mu * f + wedge(dfm, ext_d(xi)):
            raise DecompositionError("df^eta = f mu + df^d(xi) failed")
        return out
    if variant == 2:
        dom = invert_euler(deta, "inverse_shifted", r)
        omega = primitive(dom, check=False)
        xi_p = primitive(eta - interior_euler(dom) * (1 / r) - omega)
        out = EulerDivision(2, eta, omega=omega, xi_prime=xi_p)
        if check and wedge(dfm, eta) != ext_d(omega * f) + wedge(dfm, ext_d(xi_p)):
            raise DecompositionError("df^eta = d(f omega) + df^d(xi') failed")
        return out
    raise ValueError("variant must be 1 or 2")


# --------------------------------------------------------------------------
# helpers on the coefficient ring Q[F, lam]


def _to_coef(family: Family, p: Poly) -> Poly:
    """Parameter-only polynomial of the family ring -> Q[F, lam]."""
    n, m = family.n, family.m
    res = {}
    for e, c in p.terms.items():
        if any(e[:n]):
            raise DecompositionError("coefficient depends on x")
        res[(0,) + e[n:]] = c
    return Poly(1 + m, res, _clean=True)


def _lam_part(family: Family, beta) -> tuple:
    return (0,) + tuple(beta)


def coef_at_F(family: Family, p: Poly) -> Poly:
    """Substitute the actual polynomial F for the formal variable."""
    ctx = family.ctx
    images = [family.F] + [ctx.lam(s) for s in range(family.m)]
    return p.compose(images, ctx.nvars)


def coef_free_term(family: Family, p: Poly) -> Poly:
    """p(F=0, lam) as a polynomial in the family ring."""
    n, m = family.n, family.m
    res = {}
    for e, c in p.terms.items():
        if e[0] == 0:
            res[(0,) * n + e[1:]] = c
    return Poly(n + m, res, _clean=True)


def _by_x_monomial(form: KForm):
    """Group terms by (index, x-exponent) -> parameter polynomial (family ring)."""
    n = form.ctx.n
    nv = form.ctx.nvars
    groups = {}
    for idx, e, c in form.iter_terms():
        groups.setdefault((idx, e[:n]), {})[(0,) * n + e[n:]] = c
    return {k: Poly(nv, v, _clean=True) for k, v in groups.items()}


def _lam_to_coef(family, w: Poly) -> Poly:
    return _to_coef(family, w)


# --------------------------------------------------------------------------
# Petrov module


@dataclass
class PetrovDecomposition:
    omega: KForm
    p: list             # Polys in Q[F, lam]
    xi: KForm
    xi_prime: KForm
    depth: int = 0
    checked: bool = False
    audit: dict = field(default_factory=dict)

    def to_json(self, family: Family):
        ring = family.ctx.coef_ring
        return {"p": [ring.format(q) for q in self.p], "xi": self.xi.to_json(),
                "xi_prime": self.xi_prime.to_json(), "depth": self.depth, "checked": self.checked,
                "audit": self.audit}


def _petrov_monomial(family: Family, idx, alpha):
    key = ("petrov", idx, alpha)
    cache = family._cache
    if key in cache:
        return cache[key]
    ctx = family.ctx
    n, m, l = family.n, family.m, family.l
    omega = KForm(ctx, n - 1, {idx: Poly.monomial(tuple(alpha) + (0,) * m)})
    out = divide_by_df(ext_d(omega), family.la, check=False)
    c = [_to_coef(family, ci) for ci in out.c]
    rest = omega
    for j, ci in enumerate(out.c):
        if ci:
            rest = rest - family.omega(j) * ci
    zero_form = KForm.zero(ctx, n - 2)
    if out.eta.is_zero():
        result = (c, zero_form, primitive(rest), 1)
    else:
        ed = euler_divide(out.eta, family.f_lifted, 2, r=family.r, check=False)
        w1 = ed.omega
        xi = -ed.xi_prime
        rest = rest - w1 * family.f_lifted - wedge(family.df, xi)
        xi_p = primitive(rest)
        w2 = w1 * family.h + wedge(family.dh, xi)
        pa, xa, xpa, da = _petrov_combine(family, w1)
        pb, xb, xpb, db = _petrov_combine(family, w2)
        F = family.F
        Fshift = (1,) + (0,) * m
        p = [ci + a.mul_monomial(Fshift) - b for ci, a, b in zip(c, pa, pb)]
        xi_tot = xi + xa * F - xpa - xb
        xip_tot = xi_p + xpa * F - xpb
        result = (p, xi_tot, xip_tot, 1 + max(da, db))
    cache[key] = result
    return result


def _petrov_combine(family: Family, omega: KForm):
    ctx = family.ctx
    n, m, l = family.n, family.m, family.l
    p = [Poly.zero(1 + m) for _ in range(l)]
    xi = KForm.zero(ctx, n - 2)
    xip = KForm.zero(ctx, n - 2)
    depth = 0
    for (idx, alpha), w in _by_x_monomial(omega).items():
        pm, xm, xpm, dm = _petrov_monomial(family, idx, alpha)
        wc = _to_coef(family, w)
        p = [a + wc * b for a, b in zip(p, pm)]
        xi = xi + xm * w
        xip = xip + xpm * w
        depth = max(depth, dm)
    return p, xi, xip, depth


def petrov_decompose(omega: KForm, family: Family, check=True) -> PetrovDecomposition:
    """omega = sum p_i(F, lam) omega_i + dF ^ xi + d xi'.

    The recursion is linear, so a non-quasihomogeneous input is handled as the
    sum of its quasihomogeneous components automatically.
    """
    if family.n < 2:
        raise DecompositionError("Petrov decomposition needs n >= 2")
    ctx = family.ctx
    if omega.ctx.nvars != ctx.nvars:
        omega = omega.with_ctx(ctx)
    if omega.k != family.n - 1:
        raise FormError("petrov_decompose expects an (n-1)-form")
    p, xi, xip, depth = _petrov_combine(family, omega)
    out = PetrovDecomposition(omega=omega, p=p, xi=xi, xi_prime=xip, depth=depth)
    if check:
        recon = wedge(family.dF, xi) + ext_d(xip)
        for i, pi in enumerate(p):
            if pi:
                recon = recon + family.omega(i) * coef_at_F(family, pi)
        if recon != omega:
            raise DecompositionError("Petrov reconstruction failed")
        out.checked = True
    return out


# --------------------------------------------------------------------------
# Brieskorn module


@dataclass
class BrieskornDecomposition:
    mu: KForm
    q: list
    zeta: KForm
    depth: int = 0
    checked: bool = False

    def to_json(self, family: Family):
        ring = family.ctx.coef_ring
        return {"q": [ring.format(v) for v in self.q], "zeta": self.zeta.to_json(),
                "depth": self.depth, "checked": self.checked}


def _brieskorn_monomial(family: Family, alpha):
    key = ("brieskorn", alpha)
    cache = family._cache
    if key in cache:
        return cache[key]
    ctx = family.ctx
    n, m = family.n, family.m
    mu = KForm.volume(ctx, Poly.monomial(tuple(alpha) + (0,) * m))
    out = divide_by_df(mu, family.la, check=False)
    c = [_to_coef(family, ci) for ci in out.c]
    if out.eta.is_zero():
        result = (c, KForm.zero(ctx, n - 2), 1)
    else:
        ed = euler_divide(out.eta, family.f_lifted, 1, r=family.r, check=False)
        mu1, z1 = ed.mu, ed.xi
        mu2 = mu1 * family.h + wedge(family.dh, ext_d(z1))
        qa, za, da = _brieskorn_combine(family, mu1)
        qb, zb, db = _brieskorn_combine(family, mu2)
        Fshift = (1,) + (0,) * m
        q = [ci + a.mul_monomial(Fshift) - b for ci, a, b in zip(c, qa, qb)]
        zeta = z1 + za * family.F - zb
        result = (q, zeta, 1 + max(da, db))
    cache[key] = result
    return result


def _brieskorn_combine(family: Family, mu: KForm):
    ctx = family.ctx
    n, m, l = family.n, family.m, family.l
    q = [Poly.zero(1 + m) for _ in range(l)]
    zeta = KForm.zero(ctx, n - 2)
    depth = 0
    for (idx, alpha), w in _by_x_monomial(mu).items():
        qm, zm, dm = _brieskorn_monomial(family, alpha)
        wc = _to_coef(family, w)
        q = [a + wc * b for a, b in zip(q, qm)]
        zeta = zeta + zm * w
        depth = max(depth, dm)
    return q, zeta, depth


def brieskorn_decompose(mu: KForm, family: Family, check=True) -> BrieskornDecomposition:
    """mu = sum q_i(F, lam) mu_i + dF ^ d zeta."""
    if family.n < 2:
        raise DecompositionError("Brieskorn decomposition needs n >= 2")
    ctx = family.ctx
    if mu.ctx.nvars != ctx.nvars:
        mu = mu.with_ctx(ctx)
    if mu.k != family.n:
        raise FormError("brieskorn_decompose expects an n-form")
    q, zeta, depth = _brieskorn_combine(family, mu)
    out = BrieskornDecomposition(mu=mu, q=q, zeta=zeta, depth=depth)
    if check:
        recon = wedge(family.dF, ext_d(zeta))
        for i, qi in enumerate(q):
            if qi:
                recon = recon + family.mu(i) * coef_at_F(family, qi)
        if recon != mu:
            raise DecompositionError("Brieskorn reconstruction failed")
        out.checked = True
    return out


# --------------------------------------------------------------------------
# audits


def generator_degree(family: Family, i):
    return family.la.degrees[i] + family.n


def all_bd(k, r, n, M):
    """k! r^(k(n+3)) M^k"""
    return factorial(int(k)) * mpq(r) ** (int(k) * (n + 3)) * mpq(M) ** int(k)


def audit_bounds(decomp: PetrovDecomposition, family: Family, M=None) -> dict:
    """Norms against the factorial bound and the degree table of the
    Petrov decomposition.  The norm bound only applies to symmetric weights."""
    ctx = family.ctx
    omega = decomp.omega
    report = {}
    total = sum((p.norm() for p in decomp.p), mpq(0))
    onorm = omega.norm("parametric")
    report["sum_p_norm"] = total
    report["omega_norm"] = onorm
    comps = omega.components()
    degree_ok = True
    if len(comps) == 1:
        k = next(iter(comps))
        report["degree"] = k
        coef_ring = ctx.coef_ring
        for i, p in enumerate(decomp.p):
            if p and not (p.is_quasihomogeneous(coef_ring.weights)
                          and coef_ring.degree(p) == k - generator_degree(family, i)):
                degree_ok = False
        for form, want in ((decomp.xi, k - family.r), (decomp.xi_prime, k)):
            if form and not (form.is_quasihomogeneous() and form.degree() == want):
                degree_ok = False
        if family.weights.symmetric and k.denominator == 1:
            report["depth_ok"] = decomp.depth <= max(int(k - family.r) + 1, 1)
    else:
        report["degree"] = None
    report["degree_ok"] = degree_ok
    if M is not None and family.weights.symmetric and report["degree"] is not None \
            and report["degree"].denominator == 1 and onorm:
        bound = all_bd(report["degree"], family.r, family.n, M) * onorm
        report["bound"] = bound
        report["ratio"] = total / bound
        report["violated"] = total > bound
    else:
        report["bound"] = None
        report["violated"] = False
    return report


def audit_json(report: dict):
    return {k: (str(v) if isinstance(v, type(mpq(0))) else v) for k, v in report.items()}
