"""Numerical periods over real ovals of hyperelliptic specializations and a
finite-difference check of the derived Pfaffian system.

At a specialization where F(x, lam) = a x2^2 + U(x1) with a > 0, each pair of
adjacent simple real roots e1 < e2 of U with U < 0 between them bounds an oval
{F = 0}.  It is parameterized as

    x1 = c + rho cos(t),  x2 = rho sin(t) sqrt(V(x1)),  V = -U / (a (x1-e1)(e2-x1)),

where V is a polynomial (U deflated by its two roots) and positive on the
closed interval.  The pulled-back integrand is smooth and 2pi-periodic, so the
trapezoid rule converges geometrically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .picard_fuchs import PfaffianSystem
from .poly import QQ, Poly


class CycleError(ValueError):
    pass


def _hyperelliptic_parts(sys: PfaffianSystem, lam):
    """(a, U) with F(x, lam) = a x2^2 + U(x1); U as a list of mpq coefficients
    indexed by power."""
    fam = sys.family
    if fam.n != 2:
        raise CycleError("numerical periods are implemented for n = 2 only")
    sub = fam.specialize([QQ(v) for v in lam])
    Fx = fam.F.subs(sub)
    a = None
    U = {}
    for e, c in Fx.terms.items():
        if e[1] == 0:
            U[e[0]] = c
        elif e == (0, 2) + (0,) * fam.m:
            a = c
        else:
            raise CycleError("specialization is not hyperelliptic (x2 occurs outside a*x2^2)")
    if a is None or a <= 0:
        raise CycleError("specialization needs a positive x2^2 coefficient")
    deg = max(U) if U else 0
    return a, [U.get(k, QQ(0)) for k in range(deg + 1)]


def _mpf(q):
    return mpmath.mpf(int(q.numerator)) / int(q.denominator)


def _real_roots(U, dps=40):
    with mpmath.workdps(dps):
        cs = [_mpf(c) for c in reversed(U)]
        while cs and cs[0] == 0:
            cs.pop(0)
        if len(cs) < 2:
            return []
        roots = mpmath.polyroots(cs, maxsteps=500, extraprec=4 * dps)
        tol = mpmath.mpf(10) ** (-dps // 2)
        out = sorted(float(mpmath.re(z)) for z in roots if abs(mpmath.im(z)) < tol)
        return out


def _polyval(coeffs, x):
    """coeffs indexed by power."""
    acc = 0.0 * x
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


@dataclass
class CycleSpec:
    lam: list
    e1: float
    e2: float
    orientation: int = 1

    def __post_init__(self):
        if not self.e1 < self.e2:
            raise CycleError("need e1 < e2")
        if self.orientation not in (1, -1):
            raise CycleError("orientation must be +1 or -1")

    def flipped(self):
        return CycleSpec(self.lam, self.e1, self.e2, -self.orientation)

    def to_json(self):
        return {"lam": [str(v) for v in self.lam], "e1": self.e1, "e2": self.e2,
                "orientation": self.orientation}


def find_ovals(sys: PfaffianSystem, lam):
    """All real ovals at lam as (e1, e2) pairs, left to right."""
    a, U = _hyperelliptic_parts(sys, lam)
    roots = _real_roots(U)
    Uf = [float(c) for c in U]
    out = []
    for e1, e2 in zip(roots, roots[1:]):
        if e2 - e1 < 1e-12:
            continue
        if _polyval(Uf, 0.5 * (e1 + e2)) < 0:
            out.append((e1, e2))
    return out


def make_cycle(sys: PfaffianSystem, lam, index=0, orientation=1) -> CycleSpec:
    ovals = find_ovals(sys, lam)
    if len(ovals) <= index:
        raise CycleError(f"no real oval number {index} at this specialization ({len(ovals)} found)")
    e1, e2 = ovals[index]
    return CycleSpec([QQ(v) for v in lam], e1, e2, orientation)


def _track(sys, lam, e1, e2):
    """Oval at nearby parameters: the one closest to (e1, e2)."""
    ovals = find_ovals(sys, lam)
    if not ovals:
        raise CycleError("oval collapsed")
    best = min(ovals, key=lambda p: abs(p[0] - e1) + abs(p[1] - e2))
    if abs(best[0] - e1) + abs(best[1] - e2) > 0.5 * (e2 - e1):
        raise CycleError("oval collapsed or merged within the stencil")
    return best


def _deflate(U, e1, e2, dps=40):
    """Polynomial W (by power) with U = (x-e1)(x-e2) W, after Newton polishing
    of the roots in extended precision."""
    with mpmath.workdps(dps):
        cs = [_mpf(c) for c in U]
        p = lambda x: mpmath.polyval(list(reversed(cs)), x)
        roots = [mpmath.findroot(p, mpmath.mpf(e)) for e in (e1, e2)]
        W = list(reversed(cs))
        for r in roots:
            out = [W[0]]
            for c in W[1:-1]:
                out.append(c + out[-1] * r)
            W = out
        return [float(c) for c in reversed(W)], float(roots[0]), float(roots[1])


def _forms_numeric(sys: PfaffianSystem):
    """omega_i as (dx1 coefficient, dx2 coefficient) lists of (i, j, c)."""
    fam = sys.family
    out = []
    for i in range(sys.l):
        om = fam.omega(i)
        parts = []
        for idx in ((0,), (1,)):
            p = om.coefficient(idx)
            parts.append([(e[0], e[1], float(c)) for e, c in p.terms.items()])
        out.append(parts)
    return out


def _eval_terms(terms, x, y):
    acc = np.zeros_like(x)
    for i, j, c in terms:
        acc = acc + c * x ** i * y ** j
    return acc


def periods(sys: PfaffianSystem, cyc: CycleSpec, tol=1e-9, max_points=1 << 18):
    """I_i = integral of omega_i over the oval; returns (I, error estimate)."""
    a, U = _hyperelliptic_parts(sys, cyc.lam)
    W, e1, e2 = _deflate(U, cyc.e1, cyc.e2)
    a = float(a)
    # V = -U / (a (x-e1)(e2-x)) = W / a
    V = [c / a for c in W]
    dV = [k * V[k] for k in range(1, len(V))] or [0.0]
    c0, rho = 0.5 * (e1 + e2), 0.5 * (e2 - e1)
    forms = _forms_numeric(sys)

    def estimate(N):
        t = 2 * np.pi * np.arange(N) / N
        x = c0 + rho * np.cos(t)
        v = _polyval(V, x)
        if np.any(v <= 0):
            raise CycleError("V is not positive on the oval")
        sv = np.sqrt(v)
        y = rho * np.sin(t) * sv
        dx = -rho * np.sin(t)
        dy = rho * np.cos(t) * sv + rho * np.sin(t) * _polyval(dV, x) / (2 * sv) * dx
        vals = []
        for p1, p2 in forms:
            g = _eval_terms(p1, x, y) * dx + _eval_terms(p2, x, y) * dy
            vals.append(2 * np.pi * g.sum() / N)
        return np.array(vals)

    N = 64
    prev = estimate(N)
    while True:
        N *= 2
        cur = estimate(N)
        scale = max(np.max(np.abs(cur)), 1e-300)
        if np.max(np.abs(cur - prev)) <= tol * scale:
            final = estimate(2 * N)
            err = float(np.max(np.abs(final - cur)))
            return cyc.orientation * final, err
        if N > max_points:
            raise CycleError("quadrature did not converge")
        prev = cur


@dataclass
class VerifyReport:
    I: list
    residuals: dict
    steps: dict
    quad_error: float
    cycle: CycleSpec
    details: dict = field(default_factory=dict)

    @property
    def max_residual(self):
        return max(self.residuals.values()) if self.residuals else 0.0

    def to_json(self):
        return {"I": [float(v) for v in self.I],
                "residuals": {str(k): v for k, v in sorted(self.residuals.items())},
                "max_residual": self.max_residual,
                "steps": {str(k): v for k, v in sorted(self.steps.items())},
                "quad_error": self.quad_error, "cycle": self.cycle.to_json()}


def _matrices_float(sys, lam):
    return [np.array([[float(v) for v in row] for row in M]) for M in sys.at(lam)]


def hyperelliptic_directions(sys: PfaffianSystem):
    """Parameter indices (0-based) whose monomial does not involve x2."""
    return [s for s, e in enumerate(sys.family.monomials) if all(k == 0 for k in e[1:])]


def pfaffian_residual(sys: PfaffianSystem, cyc: CycleSpec, step=1e-4, tol=1e-9, directions=None):
    """Central differences of C_0 I in each x2-free direction against C_s I."""
    lam = [QQ(v) for v in cyc.lam]
    if directions is None:
        directions = hyperelliptic_directions(sys)
    h = QQ(Fraction(str(step)))
    I0, err = periods(sys, cyc, tol)
    mats = _matrices_float(sys, lam)
    residuals, steps = {}, {}
    for s in directions:
        G = []
        for sign in (1, -1):
            lam2 = list(lam)
            lam2[s] = lam2[s] + sign * h
            e1, e2 = _track(sys, lam2, cyc.e1, cyc.e2)
            I2, err2 = periods(sys, CycleSpec(lam2, e1, e2, cyc.orientation), tol)
            err = max(err, err2)
            G.append(_matrices_float(sys, lam2)[0] @ I2)
        fd = (G[0] - G[1]) / (2 * float(h))
        target = mats[s + 1] @ I0
        residuals[s + 1] = float(np.linalg.norm(fd - target) / (np.linalg.norm(target) + 1e-12))
        steps[s + 1] = float(h)
    return VerifyReport(I=list(I0), residuals=residuals, steps=steps, quad_error=err, cycle=cyc)
