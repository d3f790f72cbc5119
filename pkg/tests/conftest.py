import random

import pytest
from hypothesis import settings

from brieskorn.family import make_family
from brieskorn.forms import KForm
from brieskorn.poly import Poly, PolyRing, QQ, infer_weights, x_names
from brieskorn.local_algebra import monomials_up_to

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

XY = PolyRing(("x1", "x2"), (1, 1))

FAMILIES = {
    "A2": "x1^3+x2^2",
    "A3": "x1^4+x2^2",
    "D4": "x1^2*x2+x2^3",
    "sym3": "x1^3+x2^3",
}


def parse_xy(text):
    return XY.parse(text)


def ring(n):
    return PolyRing(x_names(n), (1,) * n)


_family_cache = {}


def family_for(text):
    fam = _family_cache.get(text)
    if fam is None:
        f = parse_xy(text)
        fam = make_family(f, infer_weights(f, 2))
        _family_cache[text] = fam
    return fam


@pytest.fixture(params=sorted(FAMILIES))
def family(request):
    return family_for(FAMILIES[request.param])


def random_rational(rng):
    num = rng.randint(-5, 5) or 1
    return QQ(num) / rng.choice([1, 1, 1, 2, 3])


def random_form(rng, fam, k, max_x_degree, with_lambda=False, terms=3):
    """Random monomial k-form with x-exponents of bounded plain degree."""
    from itertools import combinations
    ctx = fam.ctx
    n, m = fam.n, fam.m
    idx_choices = list(combinations(range(n), k))
    coeffs = {}
    for _ in range(rng.randint(1, terms)):
        idx = rng.choice(idx_choices)
        e = [0] * (n + m)
        budget = rng.randint(0, max_x_degree)
        for _ in range(budget):
            e[rng.randrange(n)] += 1
        if with_lambda and m and rng.random() < 0.4:
            e[n + rng.randrange(m)] += 1
        p = Poly.monomial(tuple(e), random_rational(rng))
        coeffs[idx] = coeffs.get(idx, Poly.zero(n + m)) + p
    return KForm(ctx, k, coeffs)


def random_qh_form(rng, fam, k, degree):
    """Random quasihomogeneous k-form of joint (x, lam) degree ``degree``."""
    from itertools import combinations
    ctx = fam.ctx
    n, m = fam.n, fam.m
    weights = list(ctx.ring.weights)
    coeffs = {}
    for idx in combinations(range(n), k):
        target = degree - sum(weights[i] for i in idx)
        if target < 0:
            continue
        mons = monomials_up_to(weights, target).get(target, [])
        for e in rng.sample(mons, min(len(mons), 2)):
            p = Poly.monomial(tuple(e), random_rational(rng))
            coeffs[idx] = coeffs.get(idx, Poly.zero(n + m)) + p
    return KForm(ctx, k, coeffs)


@pytest.fixture
def rng():
    return random.Random(1234)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "ACCEPTANCE", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
