"""Sparse exact polynomials over Q with quasihomogeneous grading.

A :class:`Poly` is a bare mapping from exponent tuples to nonzero ``mpq``
coefficients; variable names and weights live in a :class:`PolyRing`.  The
x-variables come first, parameter variables after them, so the graded-lex
term order automatically ranks x before the parameters.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from operator import add

from gmpy2 import mpq

from .linalg import rref


def QQ(value) -> mpq:
    """Coerce int / Fraction / mpq / 'p/q' text to an exact rational."""
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, float):
        raise TypeError("floating-point coefficients are not allowed")
    return mpq(value)


class _Undefined:
    """Degree of the zero polynomial/form."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "undefined"

    def __bool__(self):
        return False


UNDEFINED = _Undefined()


def glex_key(exp):
    return (sum(exp), exp)


class Poly:
    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms=None, *, _clean=False):
        self.nvars = nvars
        if terms is None:
            self.terms = {}
        elif _clean:
            self.terms = terms
        else:
            self.terms = {}
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != nvars:
                    raise ValueError(f"exponent {e} does not match {nvars} variables")
                c = QQ(c)
                if c:
                    self.terms[e] = self.terms.get(e, 0) + c
                    if not self.terms[e]:
                        del self.terms[e]
        self._hash = None

    # -- constructors --------------------------------------------------
    @classmethod
    def zero(cls, nvars):
        return cls(nvars, {}, _clean=True)

    @classmethod
    def const(cls, c, nvars):
        c = QQ(c)
        return cls(nvars, {(0,) * nvars: c} if c else {}, _clean=True)

    @classmethod
    def monomial(cls, exp, coef=1):
        exp = tuple(exp)
        c = QQ(coef)
        return cls(len(exp), {exp: c} if c else {}, _clean=True)

    @classmethod
    def var(cls, i, nvars):
        e = [0] * nvars
        e[i] = 1
        return cls.monomial(e)

    # -- predicates / access ------------------------------------------
    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def coefficient(self, exp):
        return self.terms.get(tuple(exp), mpq(0))

    def sorted_terms(self, reverse=True):
        return sorted(self.terms.items(), key=lambda t: glex_key(t[0]), reverse=reverse)

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms.get((0,) * self.nvars, mpq(0))

    def uses_var(self, i):
        return any(e[i] for e in self.terms)

    # -- arithmetic -----------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
            return other
        return Poly.const(other, self.nvars)

    def __add__(self, other):
        other = self._coerce(other)
        if len(other.terms) > len(self.terms):
            big, small = other, self
        else:
            big, small = self, other
        res = dict(big.terms)
        for e, c in small.terms.items():
            v = res.get(e)
            if v is None:
                res[e] = c
            else:
                v = v + c
                if v:
                    res[e] = v
                else:
                    del res[e]
        return Poly(self.nvars, res, _clean=True)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()}, _clean=True)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c):
        c = QQ(c)
        if not c:
            return Poly.zero(self.nvars)
        return Poly(self.nvars, {e: v * c for e, v in self.terms.items()}, _clean=True)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        other = self._coerce(other)
        if len(self.terms) < len(other.terms):
            a, b = self.terms, other.terms
        else:
            a, b = other.terms, self.terms
        res = {}
        get = res.get
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = tuple(map(add, e1, e2))
                v = get(e)
                res[e] = c1 * c2 if v is None else v + c1 * c2
        return Poly(self.nvars, {e: c for e, c in res.items() if c}, _clean=True)

    def __rmul__(self, other):
        return self.scale(other)

    def mul_monomial(self, exp, coef=1):
        coef = QQ(coef)
        if not coef:
            return Poly.zero(self.nvars)
        return Poly(self.nvars, {tuple(map(add, e, exp)): c * coef for e, c in self.terms.items()},
                    _clean=True)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = Poly.const(1, self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __truediv__(self, c):
        if isinstance(c, Poly):
            c = c.constant_value()
        c = QQ(c)
        if not c:
            raise ZeroDivisionError("division by zero")
        return self.scale(1 / c)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        try:
            return self == Poly.const(other, self.nvars)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    # -- calculus / substitution ----------------------------------------
    def diff(self, i):
        res = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                e2 = list(e)
                e2[i] = k - 1
                res[tuple(e2)] = c * k
        return Poly(self.nvars, res, _clean=True)

    def subs(self, values: dict):
        """Substitute rationals for some variables (index -> value); keeps nvars."""
        vals = {i: QQ(v) for i, v in values.items()}
        res = {}
        for e, c in self.terms.items():
            e2 = list(e)
            for i, v in vals.items():
                if e2[i]:
                    c = c * v ** e2[i]
                    e2[i] = 0
            if c:
                e2 = tuple(e2)
                s = res.get(e2, 0) + c
                if s:
                    res[e2] = s
                else:
                    res.pop(e2, None)
        return Poly(self.nvars, res, _clean=True)

    def evaluate(self, point):
        """Evaluate at a full point (any numeric type supporting + and *)."""
        total = 0
        for e, c in self.terms.items():
            t = c
            for v, k in zip(point, e):
                if k:
                    t = t * v ** k
            total = total + t
        return total

    def compose(self, images, nvars):
        """Substitute polynomial images (one per variable, in ``nvars`` variables)."""
        res = Poly.zero(nvars)
        powers = {}
        for e, c in self.terms.items():
            t = Poly.const(c, nvars)
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in powers:
                        powers[key] = images[i] ** k
                    t = t * powers[key]
            res = res + t
        return res

    def remap(self, nvars, positions):
        """Embed into a ring with ``nvars`` variables; variable i goes to positions[i]."""
        res = {}
        for e, c in self.terms.items():
            e2 = [0] * nvars
            for i, k in enumerate(e):
                if k:
                    e2[positions[i]] += k
            res[tuple(e2)] = c
        return Poly(nvars, res, _clean=True)

    # -- grading / norms --------------------------------------------------
    def norm(self):
        """Sum of absolute values of all coefficients."""
        return reduce(add, (abs(c) for c in self.terms.values()), mpq(0))

    def degree(self, weights):
        if not self.terms:
            return UNDEFINED
        return max(term_degree(e, weights) for e in self.terms)

    def components(self, weights):
        """Split into quasihomogeneous components {degree: Poly}."""
        parts = {}
        for e, c in self.terms.items():
            parts.setdefault(term_degree(e, weights), {})[e] = c
        return {d: Poly(self.nvars, t, _clean=True) for d, t in parts.items()}

    def is_quasihomogeneous(self, weights):
        return len({term_degree(e, weights) for e in self.terms}) <= 1

    def __repr__(self):
        names = tuple(f"v{i}" for i in range(self.nvars))
        return f"Poly({format_poly(self, names)!r})"


def term_degree(exp, weights):
    d = mpq(0)
    for k, w in zip(exp, weights):
        if k:
            d += k * w
    return d


# --------------------------------------------------------------------------
# printing / parsing


def _format_monomial(exp, names):
    parts = []
    for k, name in zip(exp, names):
        if k == 1:
            parts.append(name)
        elif k:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


def format_poly(p: Poly, names) -> str:
    if p.is_zero():
        return "0"
    out = []
    for e, c in p.sorted_terms():
        mono = _format_monomial(e, names)
        a = abs(c)
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        if not out:
            out.append(body if c > 0 else f"-{body}")
        else:
            out.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(out)


class ParseError(ValueError):
    def __init__(self, message, position=None):
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{message}{where}")


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def _tokenize(text):
    pos = 0
    tokens = []
    n = len(text)
    while pos < n:
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[start]!r}", start)
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("num", m.group(1), start))
        elif m.group(2):
            tokens.append(("name", m.group(2), start))
        else:
            op = m.group(3)
            tokens.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text, ring):
        self.tokens = _tokenize(text)
        self.i = 0
        self.ring = ring

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        tok = self.take()
        if tok[1] != value:
            raise ParseError(f"expected {value!r}", tok[2])

    def expr(self):
        left = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            right = self.term()
            left = left + right if op == "+" else left - right
        return left

    def term(self):
        left = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            pos = self.peek()[2]
            right = self.unary()
            if op == "*":
                left = left * right
            else:
                if not right.is_constant() or right.is_zero():
                    raise ParseError("division only by a nonzero constant", pos)
                left = left / right.constant_value()
        return left

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("+", "-"):
            self.take()
            val = self.unary()
            return -val if tok[1] == "-" else val
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            tok = self.take()
            if tok[0] != "num":
                raise ParseError("exponent must be a non-negative integer", tok[2])
            base = base ** int(tok[1])
        return base

    def atom(self):
        kind, val, pos = self.take()
        nv = len(self.ring.names)
        if kind == "num":
            return Poly.const(int(val), nv)
        if kind == "name":
            try:
                idx = self.ring.names.index(val)
            except ValueError:
                raise ParseError(f"unknown variable {val!r}", pos) from None
            return Poly.var(idx, nv)
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        if kind == "end":
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected token {val!r}", pos)


@dataclass(frozen=True)
class PolyRing:
    """Named, weighted variables for printing, parsing and grading."""

    names: tuple
    weights: tuple

    def __post_init__(self):
        if len(self.names) != len(self.weights):
            raise ValueError("names/weights length mismatch")
        object.__setattr__(self, "weights", tuple(QQ(w) for w in self.weights))

    @property
    def nvars(self):
        return len(self.names)

    def gen(self, name):
        return Poly.var(self.names.index(name), self.nvars)

    def gens(self):
        return [Poly.var(i, self.nvars) for i in range(self.nvars)]

    def zero(self):
        return Poly.zero(self.nvars)

    def one(self):
        return Poly.const(1, self.nvars)

    def parse(self, text: str) -> Poly:
        return parse_poly(text, self)

    def format(self, p: Poly) -> str:
        return format_poly(p, self.names)

    def monomial_text(self, exp) -> str:
        return _format_monomial(exp, self.names) or "1"

    def degree(self, p: Poly):
        return p.degree(self.weights)

    def is_quasihomogeneous(self, p: Poly):
        return p.is_quasihomogeneous(self.weights)

    def to_json(self, p: Poly):
        return poly_to_json(p)

    def from_json(self, data) -> Poly:
        return poly_from_json(data, self.nvars)


def parse_poly(text: str, ring: PolyRing) -> Poly:
    parser = _Parser(text, ring)
    result = parser.expr()
    tok = parser.peek()
    if tok[0] != "end":
        raise ParseError(f"unexpected token {tok[1]!r}", tok[2])
    return result


def poly_to_json(p: Poly):
    return [{"exp": list(e), "coef": str(c)} for e, c in p.sorted_terms()]


def poly_from_json(data, nvars) -> Poly:
    return Poly(nvars, {tuple(t["exp"]): mpq(t["coef"]) for t in data})


# --------------------------------------------------------------------------
# weights


@dataclass(frozen=True)
class WeightSystem:
    """Positive rational weights w_1..w_n normalised to sum to n, and the
    reference degree r of the principal part once known."""

    weights: tuple
    r: mpq | None = None

    def __post_init__(self):
        w = tuple(QQ(v) for v in self.weights)
        object.__setattr__(self, "weights", w)
        if self.r is not None:
            object.__setattr__(self, "r", QQ(self.r))
        if any(v <= 0 for v in w):
            raise ValueError("weights must be positive")
        if sum(w) != len(w):
            raise ValueError(f"weights must sum to n={len(w)}, got {sum(w)}")

    @property
    def n(self):
        return len(self.weights)

    @property
    def symmetric(self):
        return all(v == 1 for v in self.weights)

    @property
    def max_weight(self):
        return max(self.weights)

    @classmethod
    def symmetric_weights(cls, n, r=None):
        return cls((1,) * n, r)

    def with_r(self, r):
        return WeightSystem(self.weights, r)


class NotQuasihomogeneous(ValueError):
    pass


class Underdetermined(ValueError):
    pass


def infer_weights(f: Poly, n: int | None = None) -> WeightSystem:
    """Find the weights making ``f`` quasihomogeneous with sum(w) = n.

    Only the first ``n`` variables are considered (they must be the only ones
    used).  Raises NotQuasihomogeneous / Underdetermined.
    """
    if n is None:
        n = f.nvars
    if f.is_zero():
        raise Underdetermined("zero polynomial carries no weight information")
    for e in f.terms:
        if any(e[n:]):
            raise ValueError("infer_weights expects a polynomial in the x-variables only")
    for i in range(n):
        if not f.uses_var(i):
            raise Underdetermined(f"polynomial does not depend on variable {i + 1}")
    # unknowns w_1..w_n, r
    rows = [[mpq(k) for k in e[:n]] + [mpq(-1), mpq(0)] for e in sorted(f.terms)]
    rows.append([mpq(1)] * n + [mpq(0), mpq(n)])
    piv = rref(rows, n + 1)
    for i in range(len(piv), len(rows)):
        if rows[i][n + 1]:
            raise NotQuasihomogeneous("not quasihomogeneous: no weight vector fits every monomial")
    if len(piv) < n + 1:
        raise Underdetermined("underdetermined: exponents do not fix the weights; supply them")
    sol = [rows[k][n + 1] for k in range(n + 1)]
    w, r = sol[:n], sol[n]
    if any(v <= 0 for v in w):
        raise NotQuasihomogeneous("not quasihomogeneous: no positive weight vector exists")
    return WeightSystem(tuple(w), r)


# --------------------------------------------------------------------------
# variable contexts


def x_names(n):
    return tuple(f"x{i + 1}" for i in range(n))


def lam_names(m):
    return tuple(f"lam{s + 1}" for s in range(m))


@dataclass(frozen=True)
class VarContext:
    """x-variables with weights, optional parameters lam_s with weights, and
    the formal variable F (degree r) used by decomposition coefficients."""

    weights: WeightSystem
    lam_weights: tuple = ()
    ring: PolyRing = field(init=False, compare=False, repr=False)
    coef_ring: PolyRing = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        lw = tuple(QQ(v) for v in self.lam_weights)
        object.__setattr__(self, "lam_weights", lw)
        n, m = self.weights.n, len(lw)
        object.__setattr__(self, "ring", PolyRing(x_names(n) + lam_names(m), self.weights.weights + lw))
        r = self.weights.r if self.weights.r is not None else mpq(0)
        object.__setattr__(self, "coef_ring", PolyRing(("F",) + lam_names(m), (r,) + lw))

    @property
    def n(self):
        return self.weights.n

    @property
    def m(self):
        return len(self.lam_weights)

    @property
    def nvars(self):
        return self.n + self.m

    @property
    def x_weights(self):
        """Weights with parameters at zero: the grading seen by the Euler field."""
        return self.weights.weights + (mpq(0),) * self.m

    def x(self, i):
        return Poly.var(i, self.nvars)

    def lam(self, s):
        return Poly.var(self.n + s, self.nvars)

    def parse(self, text):
        return self.ring.parse(text)

    def format(self, p):
        return self.ring.format(p)

    def degree(self, p):
        return self.ring.degree(p)

    def x_degree(self, p):
        return p.degree(self.x_weights)

    def embed(self, p: Poly) -> Poly:
        """Lift a polynomial in the first k<=n+m variables of this ring."""
        if p.nvars == self.nvars:
            return p
        return p.remap(self.nvars, list(range(p.nvars)))

    def is_lambda_free(self, p: Poly):
        n = self.n
        return all(not any(e[n:]) for e in p.terms)

    def norm(self, p: Poly, mode="plain"):
        if mode == "plain" and not self.is_lambda_free(p):
            raise ValueError("plain norm of a parameter-dependent polynomial; "
                             "bind the parameters or use mode='parametric'")
        if mode not in ("plain", "parametric"):
            raise ValueError(f"unknown norm mode {mode!r}")
        return p.norm()


def weighted_degree(p, weights):
    """Weighted degree of a Poly (weights per variable) or KForm (its context);
    UNDEFINED for zero."""
    if hasattr(p, "degree") and not isinstance(p, Poly):
        return p.degree()
    return p.degree(weights)


def is_quasihomogeneous(p, weights=None):
    if not isinstance(p, Poly):
        return p.is_quasihomogeneous()
    return p.is_quasihomogeneous(weights)


def norm(p, mode="plain", ctx: VarContext | None = None):
    """Sum of absolute coefficient values.  ``plain`` refuses parameter
    dependence (needs ``ctx`` to know which variables are parameters)."""
    if not isinstance(p, Poly):
        return p.norm(mode)
    if ctx is not None:
        return ctx.norm(p, mode)
    return p.norm()
