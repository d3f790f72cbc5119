import dataclasses
import json
from functools import lru_cache

import pytest
from gmpy2 import mpq

from brieskorn.numeric import make_cycle, pfaffian_residual
from brieskorn.picard_fuchs import (RestrictionRefused, check_structure, derive_pfaffian, logpole_check,
                                    read_system_json, restrict_hypergeometric, spectrum_check)
from brieskorn.poly import Poly, PolyRing

XY = PolyRing(("x1", "x2"), (1, 1))


@lru_cache(maxsize=None)
def system(text, formula="corrected", order=None):
    return derive_pfaffian(XY.parse(text), formula=formula, order=order and list(order),
                           check_det=text not in ("x1^4+x2^4", "x1^3+x2^7"))


def test_circle_closed_form():
    # F = x1^2 + x2^2 + lam1 + lam2 x2 + lam3 x1: the oval is a circle of
    # squared radius -C_0 and its area -pi C_0 gives C_1 = 2, C_s = -lam_s
    sys = system("x1^2+x2^2")
    ctx = sys.ctx
    assert sys.family.monomial_texts() == ["1", "x2", "x1"]
    assert sys.C[0] == [[ctx.parse("lam1 - 1/4*lam2^2 - 1/4*lam3^2")]]
    assert sys.C[1] == [[ctx.parse("2")]]
    assert sys.C[2] == [[ctx.parse("-lam2")]]
    assert sys.C[3] == [[ctx.parse("-lam3")]]
    assert sys.M_hat == 1


@pytest.mark.parametrize("text", ["x1^3+x2^2", "x1^4+x2^2", "x1^2*x2+x2^3", "x1^3+x2^3"])
def test_structure(text):
    sys = system(text)
    report = check_structure(sys)
    assert report["det_monic"]
    ctx = sys.ctx
    lam1 = ctx.lam(0)
    for i in range(sys.l):
        for j in range(sys.l):
            rest = sys.C[0][i][j] - (lam1 if i == j else Poly.zero(ctx.nvars))
            assert not rest.uses_var(sys.family.n)
    assert ctx.degree(sys.detC0) == sys.l * sys.family.r
    for row in sys.degree_table():
        assert row["max_degree"] is None or row["max_degree"] <= row["bound"]


def test_a2_matrices():
    sys = system("x1^3+x2^2")
    ctx = sys.ctx
    assert sys.C[1] == [[ctx.parse("11/6"), ctx.parse("0")],
                        [ctx.parse("-1/36*lam5^2 + 1/9*lam4"), ctx.parse("13/6")]]


@pytest.mark.parametrize("text", ["x1^3+x2^2", "x1^4+x2^2", "x1^2*x2+x2^3"])
def test_json_roundtrip(text):
    sys = system(text)
    data = json.loads(json.dumps(sys.to_json()))
    back = read_system_json(data)
    assert back.C == sys.C and back.detC0 == sys.detC0 and back.M_hat == sys.M_hat


def test_restriction_a2():
    A, B = restrict_hypergeometric(system("x1^3+x2^2"), [0, 0, 0, 0])
    assert B == [[mpq(5, 6), 0], [0, mpq(7, 6)]]
    assert A == [[0, 0], [0, 0]]
    A, B = restrict_hypergeometric(system("x1^3+x2^2"), [1, 0, 0, 0])
    assert A == [[0, mpq(2, 3)], [mpq(-2, 9), 0]]
    with pytest.raises(ValueError):
        restrict_hypergeometric(system("x1^3+x2^2"), [1])


def test_restriction_eigenvalues_are_shifted_degrees():
    # at the origin B = C_1 - 1 is triangular with entries (deg mu_i) / r
    for text in ("x1^4+x2^2", "x1^2*x2+x2^3"):
        sys = system(text)
        A, B = restrict_hypergeometric(sys, [0] * (sys.m - 1))
        fam = sys.family
        diag = sorted(B[i][i] for i in range(sys.l))
        assert diag == sorted((d + fam.n) / fam.r for d in fam.la.degrees)


def test_restriction_x14_x24_is_lam1_free():
    # rho = r: lam1 could only enter C_1 as a bare multiple of F - lam1, and
    # that multiple vanishes because C_1 is diagonal at lam2 = .. = lamm = 0
    sys = system("x1^4+x2^4")
    A, B = restrict_hypergeometric(sys, [0] * (sys.m - 1))
    fam = sys.family
    assert A == [[0] * sys.l for _ in range(sys.l)]
    assert B == [[(fam.la.degrees[i] + 2) / fam.r if i == j else 0 for j in range(sys.l)] for i in range(sys.l)]


@pytest.mark.slow
def test_restriction_refused_when_rho_exceeds_r():
    sys = system("x1^3+x2^7")
    assert sys.family.la.rho > sys.family.r
    with pytest.raises(RestrictionRefused) as exc:
        restrict_hypergeometric(sys, [0] * (sys.m - 1))
    assert [(i, j) for i, j, _ in exc.value.entries] == [(11, 0)]


def test_spectrum_a2_morse():
    sys = system("x1^3+x2^2")
    rep = spectrum_check(sys, [0, -1, 0, 0, 0])
    assert not rep.degenerate
    assert rep.relative_distance <= 1e-8
    assert max(rep.eigvec_residuals) <= 1e-6
    assert sorted(round(float(v.real), 4) for v in rep.critical_values) == [-0.3849, 0.3849]


def test_spectrum_degenerate_at_origin():
    rep = spectrum_check(system("x1^3+x2^2"), [0] * 5)
    assert rep.degenerate and "all critical values 0" in rep.message


def test_spectrum_shift():
    # lam1 -> lam1 + t shifts both the eigenvalues and the critical values by t
    sys = system("x1^4+x2^2")
    base = [0, -1, 0, 0, mpq(1, 3), 0, 0][:sys.m]
    shifted = [mpq(5, 2)] + base[1:]
    r0 = spectrum_check(sys, base)
    r1 = spectrum_check(sys, shifted)
    assert not r0.degenerate
    a = sorted(float(v.real) for v in r0.eigenvalues)
    b = sorted(float(v.real) for v in r1.eigenvalues)
    assert all(abs(y - x - 2.5) < 1e-20 + 1e-12 for x, y in zip(a, b))
    assert r1.relative_distance <= 1e-8


def test_order_permutation_invariance():
    base = system("x1^3+x2^2")
    perm = (0, 2, 1, 4, 3)
    other = system("x1^3+x2^2", order=perm)
    # lam_k of the permuted family is lam_perm[k] of the canonical one
    inverse = {p: k for k, p in enumerate(perm)}
    n = base.family.n
    images = [Poly.var(i, base.ctx.nvars) for i in range(n)]
    images += [Poly.var(n + inverse[s], base.ctx.nvars) for s in range(base.m)]
    for s_other, s_base in enumerate([0] + [p + 1 for p in perm]):
        for i in range(base.l):
            for j in range(base.l):
                assert base.C[s_base][i][j].compose(images, base.ctx.nvars) == other.C[s_other][i][j]


@pytest.mark.parametrize("text", ["x1^3+x2^2", "x1^4+x2^2", "x1^2*x2+x2^3"])
def test_logpoles_small(text):
    sys = system(text)
    fast = logpole_check(sys)
    full = logpole_check(sys, full_pairs=True)
    assert fast.logarithmic and full.logarithmic
    assert full.pairs_checked == sys.m * (sys.m - 1) // 2


def test_logpoles_detect_a_perturbed_system():
    sys = system("x1^3+x2^2")
    C2 = [[e + Poly.const(1 if (i, j) == (0, 1) else 0, sys.ctx.nvars) for j, e in enumerate(row)]
          for i, row in enumerate(sys.C[2])]
    bad = dataclasses.replace(sys, C=sys.C[:2] + [C2] + sys.C[3:])
    fast = logpole_check(bad)
    full = logpole_check(bad, full_pairs=True)
    assert not fast.logarithmic and not full.logarithmic
    assert {tuple(f[:2]) for f in fast.failures_dg_omega} == {(1, 2)}


def test_literal_formula_fails_numerically():
    lam = [mpq(1, 10), -1, 0, 0, 0]
    good = system("x1^3+x2^2")
    bad = system("x1^3+x2^2", formula="literal")
    cyc = make_cycle(good, lam)
    assert pfaffian_residual(good, cyc).max_residual < 1e-6
    assert pfaffian_residual(bad, cyc).max_residual > 0.1


def test_requires_two_variables():
    with pytest.raises(ValueError):
        derive_pfaffian(PolyRing(("x1",), (1,)).parse("x1^3"))
