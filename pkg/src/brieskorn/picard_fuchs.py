"""Pfaffian Picard-Fuchs system of the general semiquasihomogeneous family and
its structural checkers (spectrum, hypergeometric restriction, pole type).

For the period vector I(lam) = (integral of omega_i over a cycle on F = 0) the
system reads d/dlam_s (C_0 I) = C_s I with polynomial matrices C_s(lam).

Derivation per basis form:

    F mu_i = sum_j c_ij(lam) mu_j + dF ^ eta_i        (C_0 = (c_ij))

where F mu_i is first prepared as dF ^ eta'_i + (h mu_i - dh ^ eta'_i) with
eta'_i = i_X mu_i / r, so f itself never multiplies a form.  With
Psi_i = F omega_i - sum_j c_ij omega_j one has d Psi_i = dF ^ (omega_i + eta_i),
and differentiating its integral along the moving level set gives

    d/dlam_s (C_0 I)_i = sum_j (d c_ij / dlam_s) I_j + integral of f_s eta_i,

so C_s = dC_0/dlam_s + P_s where row i of P_s is the Petrov decomposition of
f_s eta_i evaluated at F = 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import flint
import mpmath
from gmpy2 import mpq

from . import polymat
from .decompose import coef_free_term, petrov_decompose
from .division import division_modulus, divide_by_dF
from .family import Family, make_family
from .forms import interior_euler, wedge
from .poly import QQ, Poly, VarContext, WeightSystem, lam_names, x_names

FamilySpec = Family


class StructureError(AssertionError):
    """A structural property of the derived system failed."""


class RestrictionRefused(ValueError):
    def __init__(self, entries):
        self.entries = entries
        super().__init__(f"C_1 depends on lam1 in {len(entries)} entries")


class SpectrumError(ValueError):
    pass


def _lam_diff(family: Family, p: Poly, s):
    return p.diff(family.n + s)


@dataclass
class PfaffianSystem:
    family: Family
    C: list                      # C[s] is an l x l list of Polys (parameter-only)
    det_cache: Poly | None = field(repr=False, default=None)
    eta: list = field(repr=False, default_factory=list)
    M_hat: mpq | None = None
    formula: str = "corrected"

    @property
    def detC0(self) -> Poly:
        """det C_0, computed on first use (the expensive step for large l)."""
        if self.det_cache is None:
            fam = self.family
            self.det_cache = polymat.from_flint(polymat.det(_to_flint_matrix(fam, self.C[0])),
                                                self.ctx.nvars, _lam_positions(fam))
        return self.det_cache

    @property
    def l(self):
        return self.family.l

    @property
    def m(self):
        return self.family.m

    @property
    def ctx(self) -> VarContext:
        return self.family.ctx

    def entry_text(self, s, i, j):
        return self.ctx.format(self.C[s][i][j])

    def residue_numerator(self, s):
        """C_s - dC_0/dlam_s for s = 1..m."""
        fam = self.family
        return [[self.C[s][i][j] - _lam_diff(fam, self.C[0][i][j], s - 1)
                 for j in range(self.l)] for i in range(self.l)]

    def at(self, values):
        """All matrices specialized at rational parameter values (mpq entries)."""
        sub = self.family.specialize([QQ(v) for v in values])
        out = []
        for Cs in self.C:
            out.append([[e.subs(sub).constant_value() for e in row] for row in Cs])
        return out

    def degree_table(self):
        fam = self.family
        table = []
        for s, Cs in enumerate(self.C):
            top = max((self.ctx.degree(e) for row in Cs for e in row if e), default=None)
            bound = fam.r + fam.la.rho if s == 0 else fam.monomial_degree(s - 1) + fam.la.rho
            table.append({"s": s, "max_degree": top, "bound": bound})
        return table

    def to_json(self):
        fam = self.family
        ctx = self.ctx
        return {
            "f": fam.x_ring().format(fam.f),
            "weights": [str(w) for w in fam.weights.weights],
            "r": str(fam.r),
            "monomials": [{"f_s": t, "lam_degree": str(d)}
                          for t, d in zip(fam.monomial_texts(), fam.lam_degrees)],
            "basis": fam.la.basis_text(),
            "C": [[[ctx.format(e) for e in row] for row in Cs] for Cs in self.C],
            "detC0": ctx.format(self.detC0),
            "M_hat": None if self.M_hat is None else str(self.M_hat),
            "formula": self.formula,
            "degree_table": [{"s": d["s"], "max_degree": None if d["max_degree"] is None else str(d["max_degree"]),
                              "bound": str(d["bound"])} for d in self.degree_table()],
        }


def read_system_json(data) -> PfaffianSystem:
    """Rebuild a system from its JSON rendering (the family is re-derived from f)."""
    n = len(data["weights"])
    from .poly import PolyRing
    w = WeightSystem(tuple(QQ(v) for v in data["weights"]))
    ring = PolyRing(x_names(n), w.weights)
    fam = make_family(ring.parse(data["f"]), w)
    if fam.monomial_texts() != [d["f_s"] for d in data["monomials"]]:
        raise ValueError("monomial order in JSON differs from the canonical order")
    ctx = fam.ctx
    C = [[[ctx.parse(t) for t in row] for row in Cs] for Cs in data["C"]]
    M = data.get("M_hat")
    return PfaffianSystem(family=fam, C=C, det_cache=ctx.parse(data["detC0"]),
                          M_hat=None if M is None else QQ(M), formula=data.get("formula", "corrected"))


# --------------------------------------------------------------------------
# derivation


def _prepared_division(family: Family, i):
    """F mu_i = sum_j c_ij mu_j + dF ^ eta_i via the Euler preparation."""
    r = family.r
    mu = family.mu(i)
    eta_p = interior_euler(mu) * (1 / r)
    mu_p = mu * family.h - wedge(family.dh, eta_p)
    out = divide_by_dF(mu_p, family, check=True)
    eta = eta_p + out.eta
    return out.c, eta


def derive_pfaffian(f: Poly, weights: WeightSystem | None = None, *, order=None,
                    formula="corrected", with_modulus=True, check_det=True) -> PfaffianSystem:
    """Derive C_0..C_m for the general family with principal part f.

    ``formula="literal"`` builds C_s from the Petrov decomposition of
    -f_s (omega_i + eta_i) instead; it is kept only to compare against the
    corrected derivation and skips the structural assertions on C_s.
    ``check_det=False`` leaves det C_0 to be computed on first use and skips
    its structural checks; the restriction test needs only C_1.
    """
    if formula not in ("corrected", "literal"):
        raise ValueError("formula must be 'corrected' or 'literal'")
    family = make_family(f, weights, order=order)
    return derive_for_family(family, formula=formula, with_modulus=with_modulus, check_det=check_det)


def derive_for_family(family: Family, formula="corrected", with_modulus=True, check_det=True) -> PfaffianSystem:
    if family.n < 2:
        raise ValueError("the Pfaffian system needs n >= 2")
    l, m = family.l, family.m
    ctx = family.ctx
    C0, etas = [], []
    for i in range(l):
        c, eta = _prepared_division(family, i)
        C0.append(c)
        etas.append(eta)
        lhs = family.mu(i) * family.F
        rhs = wedge(family.dF, eta)
        for j in range(l):
            if c[j]:
                rhs = rhs + family.mu(j) * c[j]
        if lhs != rhs:
            raise StructureError(f"F mu_{i + 1} reconstruction failed")
    C = [C0]
    for s in range(m):
        fs = family.f_s(s)
        Cs = []
        for i in range(l):
            if formula == "corrected":
                dec = petrov_decompose(etas[i] * fs, family)
                row = [_lam_diff(family, C0[i][j], s) + coef_free_term(family, dec.p[j]) for j in range(l)]
            else:
                dec = petrov_decompose((family.omega(i) + etas[i]) * (-fs), family)
                row = [coef_free_term(family, dec.p[j]) for j in range(l)]
            Cs.append(row)
        C.append(Cs)
    sys = PfaffianSystem(family=family, C=C, eta=etas, formula=formula)
    if with_modulus:
        sys.M_hat = division_modulus(family.la).M_hat
    check_structure(sys, with_det=check_det)
    return sys


# --------------------------------------------------------------------------
# structure


def check_structure(sys: PfaffianSystem, with_det=True):
    """Assert the invariants of the derived system; returns a report dict."""
    fam = sys.family
    ctx = sys.ctx
    l = sys.l
    lam1 = fam.n
    for i in range(l):
        for j in range(l):
            rest = sys.C[0][i][j] - (Poly.const(1, ctx.nvars) * ctx.lam(0) if i == j else 0)
            if rest.uses_var(lam1):
                raise StructureError(f"C_0 - lam1*1 depends on lam1 at ({i + 1},{j + 1})")
    for d in sys.degree_table():
        if sys.formula == "literal" and d["s"] > 0:
            continue
        if d["max_degree"] is not None and d["max_degree"] > d["bound"]:
            raise StructureError(f"degree bound violated for C_{d['s']}")
    for Cs in sys.C if sys.formula == "corrected" else sys.C[:1]:
        for row in Cs:
            for e in row:
                if e and not e.is_quasihomogeneous(ctx.ring.weights):
                    raise StructureError("non-quasihomogeneous entry")
    if not with_det:
        return {"C0_shift": True, "degrees": True}
    D = sys.detC0
    if not D.is_quasihomogeneous(ctx.ring.weights) or ctx.degree(D) != l * fam.r:
        raise StructureError("det C_0 is not quasihomogeneous of degree l*r")
    lead = tuple(l if k == lam1 else 0 for k in range(ctx.nvars))
    if D.coefficient(lead) != 1 or max(e[lam1] for e in D.terms) != l:
        raise StructureError("det C_0 is not monic of degree l in lam1")
    return {"C0_shift": True, "degrees": True, "det_degree": str(l * fam.r), "det_monic": True}


# --------------------------------------------------------------------------
# flint bridge


def _lam_positions(family: Family):
    return [family.n + s for s in range(family.m)]


def _flint_ctx(family: Family):
    return polymat.flint_context(lam_names(family.m))


def _to_flint_matrix(family: Family, mat):
    fctx = _flint_ctx(family)
    pos = _lam_positions(family)
    return [[polymat.to_flint(e, fctx, pos) for e in row] for row in mat]


# --------------------------------------------------------------------------
# hypergeometric restriction


def restrict_hypergeometric(sys: PfaffianSystem, fixed):
    """(t + A) dI/dt = B I along the lam1 line, with lam2..lamm fixed.

    Returns the rational matrices (A, B).  Raises RestrictionRefused when C_1
    depends on lam1.
    """
    fam = sys.family
    lam1 = fam.n
    bad = [(i, j, sys.entry_text(1, i, j)) for i in range(sys.l) for j in range(sys.l)
           if sys.C[1][i][j].uses_var(lam1)]
    if bad:
        raise RestrictionRefused(bad)
    fixed = [QQ(v) for v in fixed]
    if len(fixed) != fam.m - 1:
        raise ValueError(f"expected {fam.m - 1} fixed values for lam2..lam{fam.m}")
    mats = sys.at([mpq(0)] + fixed)
    A = mats[0]
    B = [[v - (1 if i == j else 0) for j, v in enumerate(row)] for i, row in enumerate(mats[1])]
    return A, B


# --------------------------------------------------------------------------
# spectrum


@dataclass
class SpectrumReport:
    lam: list
    degenerate: bool
    critical_points: list = field(default_factory=list)
    critical_values: list = field(default_factory=list)
    eigenvalues: list = field(default_factory=list)
    max_distance: float | None = None
    relative_distance: float | None = None
    eigvec_residuals: list = field(default_factory=list)
    message: str = ""

    def to_json(self):
        c = lambda z: [float(mpmath.re(z)), float(mpmath.im(z))]
        return {
            "lam": [str(v) for v in self.lam],
            "degenerate": self.degenerate,
            "critical_points": [[c(a), c(b)] for a, b in self.critical_points],
            "critical_values": [c(v) for v in self.critical_values],
            "eigenvalues": [c(v) for v in self.eigenvalues],
            "max_distance": self.max_distance,
            "relative_distance": self.relative_distance,
            "eigvec_residuals": self.eigvec_residuals,
            "message": self.message,
        }


def _critical_points(Fx: Poly, dps):
    """Complex solutions of dF = 0 for a bivariate rational polynomial."""
    fctx = polymat.flint_context(("x1", "x2"))
    pos = [0, 1]
    p1 = polymat.to_flint(Fx.diff(0), fctx, pos)
    p2 = polymat.to_flint(Fx.diff(1), fctx, pos)
    res = p1.resultant(p2, "x2")
    if res.is_zero():
        raise SpectrumError("gradient components share a factor: critical set is not finite")
    coeffs = {k[0]: v for k, v in res.to_dict().items()}
    uni = flint.fmpq_poly([coeffs.get(k, 0) for k in range(max(coeffs) + 1)])
    with mpmath.workdps(dps):
        x1s = []
        if uni.degree() >= 1:
            sq = uni / uni.gcd(uni.derivative())
            cs = [mpmath.mpf(int(c.p)) / int(c.q) for c in reversed(sq.coeffs())]
            x1s = mpmath.polyroots(cs, maxsteps=400, extraprec=4 * dps) if len(cs) > 1 else []
        g1, g2 = Fx.diff(0), Fx.diff(1)
        pts = []
        for a in x1s:
            poly2 = {}
            for e, c in Fx.diff(1).terms.items():
                poly2[e[1]] = poly2.get(e[1], 0) + mpmath.mpf(int(c.numerator)) / int(c.denominator) * a ** e[0]
            deg = max((k for k, v in poly2.items() if abs(v) > mpmath.mpf(10) ** (-dps // 2)), default=0)
            if deg == 0:
                continue
            bs = mpmath.polyroots([poly2.get(k, 0) for k in range(deg, -1, -1)], maxsteps=400, extraprec=4 * dps)
            for b in bs:
                z = _newton(g1, g2, a, b)
                if z is not None and all(abs(z[0] - q[0]) + abs(z[1] - q[1]) > mpmath.mpf(10) ** (-dps // 3) for q in pts):
                    pts.append(z)
    return pts


def _evalc(p: Poly, a, b):
    return p.evaluate([a, b])


def _newton(g1, g2, a, b, steps=50):
    h11, h12, h22 = g1.diff(0), g1.diff(1), g2.diff(1)
    tol = mpmath.mpf(10) ** (-mpmath.mp.dps + 8)
    for _ in range(steps):
        u, v = _evalc(g1, a, b), _evalc(g2, a, b)
        j11, j12, j22 = _evalc(h11, a, b), _evalc(h12, a, b), _evalc(h22, a, b)
        det = j11 * j22 - j12 * j12
        if det == 0:
            break
        da = (u * j22 - v * j12) / det
        db = (j11 * v - j12 * u) / det
        a, b = a - da, b - db
        if abs(da) + abs(db) < tol:
            break
    scale = 1 + abs(a) + abs(b)
    if abs(_evalc(g1, a, b)) + abs(_evalc(g2, a, b)) > mpmath.mpf(10) ** (-mpmath.mp.dps // 2) * scale:
        return None
    return (a, b)


def spectrum_check(sys: PfaffianSystem, lam, dps=50, morse_tol=1e-10) -> SpectrumReport:
    """Compare eig C_0(lam) with the critical values of F(., lam)."""
    fam = sys.family
    if fam.n != 2:
        raise SpectrumError("spectrum check is implemented for n = 2 only")
    lam = [QQ(v) for v in lam]
    sub = fam.specialize(lam)
    Fx = Poly(2, {e[:2]: c for e, c in fam.F.subs(sub).terms.items()})
    C0 = sys.at(lam)[0]
    l = sys.l
    with mpmath.workdps(dps):
        M = mpmath.matrix([[mpmath.mpf(int(v.numerator)) / int(v.denominator) for v in row] for row in C0])
        eigs = list(mpmath.eig(M, left=False, right=False))
        pts = _critical_points(Fx, dps)
        cvs = [_evalc(Fx, a, b) for a, b in pts]
        report = SpectrumReport(lam=lam, degenerate=False, critical_points=pts,
                                critical_values=cvs, eigenvalues=eigs)
        distinct = all(abs(cvs[i] - cvs[j]) > morse_tol for i in range(len(cvs)) for j in range(i))
        if len(pts) != l or not distinct:
            report.degenerate = True
            if cvs and all(abs(v) < morse_tol for v in cvs):
                report.message = "degenerate: all critical values 0"
            else:
                report.message = f"degenerate: {len(pts)} critical points, distinct values: {distinct}"
            return report
        # greedy minimal-distance matching
        pairs = sorted(((abs(e - v), i, j) for i, e in enumerate(eigs) for j, v in enumerate(cvs)),
                       key=lambda t: t[0])
        used_e, used_v, dist = set(), set(), mpmath.mpf(0)
        for d, i, j in pairs:
            if i in used_e or j in used_v:
                continue
            used_e.add(i)
            used_v.add(j)
            dist = max(dist, d)
        scale = max(abs(v) for v in cvs)
        report.max_distance = float(dist)
        report.relative_distance = float(dist / scale) if scale else float(dist)
        res = []
        for (a, b), v in zip(pts, cvs):
            vec = mpmath.matrix([_evalc(Poly(2, {e: 1}), a, b) for e in fam.la.basis])
            r = M * vec - v * vec
            res.append(float(mpmath.norm(r) / mpmath.norm(vec)))
        report.eigvec_residuals = res
    return report


# --------------------------------------------------------------------------
# logarithmic poles


@dataclass
class LogPoleReport:
    g: str
    D: str
    failures_g_omega: list
    failures_dg_omega: list
    logarithmic: bool
    squarefree_trivial: bool
    pairs_checked: int = 0

    def to_json(self):
        return {"g": self.g, "detC0": self.D, "g_omega_failures": self.failures_g_omega,
                "dg_omega_failures": self.failures_dg_omega, "squarefree_D": self.squarefree_trivial,
                "pairs_checked": self.pairs_checked, "logarithmic": self.logarithmic}


def logpole_check(sys: PfaffianSystem, full_pairs=False) -> LogPoleReport:
    """Exact test that the Pfaffian form Omega has logarithmic poles on det C_0 = 0.

    With D = det C_0 and N_s = adj(C_0)(C_s - dC_0/dlam_s), Omega_s = N_s / D.
    g is the squarefree part of D (via gcd with the lam1-derivative, valid
    because D is monic in lam1).  Logarithmic iff D | g N_s and
    D | (dg/dlam_s N_t - dg/dlam_t N_s) entrywise.

    When D is squarefree (g = D), dD/dlam1 shares no factor with D and so is
    not a zero divisor modulo D; the pair conditions then follow from the
    pairs (1, t) alone, which is all that is checked unless ``full_pairs``.
    """
    fam = sys.family
    l, m = sys.l, sys.m
    names = lam_names(m)
    C0 = _to_flint_matrix(fam, sys.C[0])
    D = polymat.det(C0)
    G = D.gcd(D.derivative(names[0]))
    g = D / G
    trivial = G.is_constant()
    adj = polymat.adjugate(C0)
    N = [polymat.matmul(adj, _to_flint_matrix(fam, sys.residue_numerator(s))) for s in range(1, m + 1)]
    fail1 = []
    if not trivial:
        for s in range(m):
            for i in range(l):
                for j in range(l):
                    if not polymat.divides(D, g * N[s][i][j]):
                        fail1.append([s + 1, i + 1, j + 1])
    dg = [g.derivative(v) for v in names]
    if trivial and not full_pairs:
        pairs = [(0, t) for t in range(1, m)]
    else:
        pairs = [(s, t) for s in range(m) for t in range(s + 1, m)]
    fail2 = []
    for s, t in pairs:
        if dg[s].is_zero() and dg[t].is_zero():
            continue
        for i in range(l):
            for j in range(l):
                if not polymat.divides(D, dg[s] * N[t][i][j] - dg[t] * N[s][i][j]):
                    fail2.append([s + 1, t + 1, i + 1, j + 1])
    pos = _lam_positions(fam)
    ctx = sys.ctx
    return LogPoleReport(g=ctx.format(polymat.from_flint(g, ctx.nvars, pos)),
                         D=ctx.format(polymat.from_flint(D, ctx.nvars, pos)),
                         failures_g_omega=fail1, failures_dg_omega=fail2,
                         logarithmic=not fail1 and not fail2, squarefree_trivial=bool(trivial),
                         pairs_checked=len(pairs))
