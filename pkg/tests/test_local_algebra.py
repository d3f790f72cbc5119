import pytest
import sympy
from gmpy2 import mpq

from brieskorn.local_algebra import NonIsolatedSingularity, analyze, classify_simple, milnor_product
from brieskorn.poly import PolyRing, WeightSystem, infer_weights

ADE = [("A%d" % k, "x1^%d+x2^2" % (k + 1), k) for k in range(1, 8)]
ADE += [("D%d" % k, "x1^2*x2+x2^%d" % (k - 1), k) for k in range(4, 9)]
ADE += [("E6", "x1^3+x2^4", 6), ("E7", "x1^3+x1*x2^3", 7), ("E8", "x1^3+x2^5", 8)]


def local(text, n=2, weights=None):
    ring = PolyRing(tuple("x%d" % (i + 1) for i in range(n)), (1,) * n)
    f = ring.parse(text)
    ws = WeightSystem(tuple(mpq(w) for w in weights)) if weights else infer_weights(f, n)
    return analyze(f, ws)


def groebner_dimension(text, n):
    """dim Q[x]/<grad f> by counting standard monomials of a Groebner basis."""
    xs = sympy.symbols(" ".join("x%d" % (i + 1) for i in range(n)))
    f = sympy.sympify(text.replace("^", "**"))
    G = sympy.groebner([sympy.diff(f, x) for x in xs], *xs, order="grevlex")
    leads = [sympy.Poly(g, *xs).monoms(order="grevlex")[0] for g in G.exprs]
    bound = max(max(l) for l in leads) + 1
    count = 0
    stack = [(0,) * n]
    seen = set(stack)
    while stack:
        e = stack.pop()
        if any(all(a >= b for a, b in zip(e, lead)) for lead in leads):
            continue
        count += 1
        for i in range(n):
            nxt = e[:i] + (e[i] + 1,) + e[i + 1:]
            if nxt[i] <= bound * 4 and nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return count


@pytest.mark.parametrize("tag,text,mu", ADE)
def test_ade_milnor_numbers(tag, text, mu):
    la = local(text)
    assert la.l == mu
    assert milnor_product(la.weights) == mu
    assert groebner_dimension(text, 2) == mu
    cls = classify_simple(la)
    assert cls.tag == tag
    assert cls.rho_below_r
    assert la.basis[0] == (0, 0)


@pytest.mark.parametrize("text,n", [("x1^3+x2^3+x3^3", 3), ("x1^2*x2+x2^4+x3^2", 3), ("x1^2*x2+x1*x2^2", 2),
                                    ("x1^4+x1*x2^3", 2), ("x1^5+x2^5", 2)])
def test_other_singularities_against_groebner(text, n):
    assert local(text, n).l == groebner_dimension(text, n)


def test_x14_x24_not_simple():
    la = local("x1^4+x2^4")
    assert la.l == 9
    assert la.rho == 4 and la.r == 4
    cls = classify_simple(la)
    assert cls.tag == "not_simple"
    assert not cls.rho_below_r


def test_basis_canonical_order_and_degrees():
    la = local("x1^3+x2^2")
    assert la.weights.weights == (mpq(4, 5), mpq(6, 5))
    assert la.basis_text() == ["1", "x1"]
    assert la.degrees == [0, mpq(4, 5)]
    assert la.rho == mpq(4, 5)
    la = local("x1^3+x2^3")
    assert la.basis_text() == ["1", "x2", "x1", "x1*x2"]
    assert la.top_degree == 2


def test_special_polynomials_box_basis():
    for n, r in [(2, 3), (2, 5), (3, 3)]:
        text = "+".join("x%d^%d" % (i + 1, r) for i in range(n))
        la = local(text, n)
        assert la.l == (r - 1) ** n
        assert all(max(e) <= r - 2 for e in la.basis)


@pytest.mark.parametrize("text,n,weights", [("x1^2*x2^2", 2, (1, 1)), ("x1^3*x2^3", 2, (1, 1)),
                                            ("x1^2+x2^2", 3, (1, 1, 1))])
def test_non_isolated_refused(text, n, weights):
    with pytest.raises(NonIsolatedSingularity):
        local(text, n, weights=weights)


def test_rejects_non_quasihomogeneous():
    ring = PolyRing(("x1", "x2"), (1, 1))
    with pytest.raises(ValueError):
        analyze(ring.parse("x1^3+x2^2+x1"), WeightSystem((mpq(4, 5), mpq(6, 5))))


def test_three_variable_classification_unavailable():
    cls = classify_simple(local("x1^3+x2^3+x3^3", 3))
    assert cls.tag == "unavailable"
