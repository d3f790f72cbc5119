"""Polynomial differential forms on C^n with parameter-polynomial coefficients.

The exterior derivative and the Euler field act on the x-variables only;
parameters ride along as constants.  Index sets are 0-based sorted tuples.
"""

from __future__ import annotations

from itertools import combinations

from gmpy2 import mpq

from .poly import QQ, UNDEFINED, Poly, VarContext, poly_from_json, poly_to_json, term_degree


class FormError(ValueError):
    pass


def _insert_sign(i, index):
    """Sign of dx_i ^ dx_I after sorting, or 0 if i in I."""
    if i in index:
        return 0, None
    before = sum(1 for j in index if j < i)
    new = tuple(sorted(index + (i,)))
    return (-1 if before % 2 else 1), new


def _merge_sign(a, b):
    if set(a) & set(b):
        return 0, None
    inversions = sum(1 for i in a for j in b if i > j)
    return (-1 if inversions % 2 else 1), tuple(sorted(a + b))


class KForm:
    __slots__ = ("ctx", "k", "coeffs")

    def __init__(self, ctx: VarContext, k: int, coeffs=None):
        self.ctx = ctx
        self.k = k
        if not 0 <= k <= ctx.n:
            raise FormError(f"form degree {k} outside 0..{ctx.n}")
        self.coeffs = {}
        if coeffs:
            for idx, p in coeffs.items():
                idx = tuple(idx)
                if len(idx) != k or any(a >= b for a, b in zip(idx, idx[1:])):
                    raise FormError(f"index set {idx} must be strictly increasing of length {k}")
                if not isinstance(p, Poly):
                    p = Poly.const(p, ctx.nvars)
                p = ctx.embed(p)
                if p:
                    self.coeffs[idx] = p

    # -- construction -----------------------------------------------------
    @classmethod
    def _raw(cls, ctx, k, coeffs):
        obj = cls.__new__(cls)
        obj.ctx, obj.k, obj.coeffs = ctx, k, coeffs
        return obj

    @classmethod
    def zero(cls, ctx, k):
        return cls._raw(ctx, k, {})

    @classmethod
    def function(cls, ctx, p: Poly):
        return cls(ctx, 0, {(): p})

    @classmethod
    def dx(cls, ctx, i):
        return cls(ctx, 1, {(i,): Poly.const(1, ctx.nvars)})

    @classmethod
    def volume(cls, ctx, coef=None):
        coef = Poly.const(1, ctx.nvars) if coef is None else coef
        return cls(ctx, ctx.n, {tuple(range(ctx.n)): coef})

    @classmethod
    def top(cls, ctx, coef: Poly):
        """coef * dx_1 ^ ... ^ dx_n"""
        return cls.volume(ctx, coef)

    @classmethod
    def hat(cls, ctx, i, coef: Poly):
        """coef * dx_1 ^ .. (dx_i omitted) .. ^ dx_n"""
        return cls(ctx, ctx.n - 1, {tuple(j for j in range(ctx.n) if j != i): coef})

    # -- basics -----------------------------------------------------------
    def is_zero(self):
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def _check(self, other):
        if not isinstance(other, KForm):
            raise TypeError("expected a KForm")
        if other.k != self.k:
            raise FormError(f"cannot add forms of degrees {self.k} and {other.k}")
        if other.ctx.nvars != self.ctx.nvars:
            raise FormError("forms live in different variable contexts")

    def __add__(self, other):
        self._check(other)
        res = dict(self.coeffs)
        for idx, p in other.coeffs.items():
            q = res.get(idx)
            q = p if q is None else q + p
            if q:
                res[idx] = q
            else:
                res.pop(idx, None)
        return KForm._raw(self.ctx, self.k, res)

    def __neg__(self):
        return KForm._raw(self.ctx, self.k, {i: -p for i, p in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        """Multiplication by a function (Poly) or rational scalar."""
        if isinstance(other, KForm):
            return wedge(self, other)
        if isinstance(other, Poly):
            other = self.ctx.embed(other)
            res = {}
            for i, p in self.coeffs.items():
                q = p * other
                if q:
                    res[i] = q
            return KForm._raw(self.ctx, self.k, res)
        c = QQ(other)
        if not c:
            return KForm.zero(self.ctx, self.k)
        return KForm._raw(self.ctx, self.k, {i: p.scale(c) for i, p in self.coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, KForm):
            return NotImplemented
        return self.k == other.k and self.ctx.nvars == other.ctx.nvars and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.k, frozenset(self.coeffs.items())))

    def __repr__(self):
        return f"KForm({format_form(self)!r})"

    def coefficient(self, idx):
        return self.coeffs.get(tuple(idx), Poly.zero(self.ctx.nvars))

    def top_coefficient(self):
        if self.k != self.ctx.n:
            raise FormError("not a top-degree form")
        return self.coefficient(tuple(range(self.ctx.n)))

    def iter_terms(self):
        """Yield (index, exponent, coefficient) for every monomial term."""
        for idx, p in self.coeffs.items():
            for e, c in p.terms.items():
                yield idx, e, c

    def monomial_terms(self):
        """Split into {(index, exponent): coefficient}."""
        return {(idx, e): c for idx, e, c in self.iter_terms()}

    @classmethod
    def from_terms(cls, ctx, k, terms):
        coeffs = {}
        for (idx, e), c in terms.items():
            coeffs.setdefault(idx, {})[e] = c
        return cls._raw(ctx, k, {i: Poly(ctx.nvars, t) for i, t in coeffs.items() if Poly(ctx.nvars, t)})

    # -- grading ------------------------------------------------------------
    def _term_weight(self, idx, e, weights):
        w = term_degree(e, weights)
        for i in idx:
            w += self.ctx.weights.weights[i]
        return w

    def degree(self):
        """Joint (x, parameter) weighted degree; dx_i weighs w_i."""
        if not self.coeffs:
            return UNDEFINED
        wts = self.ctx.ring.weights
        return max(self._term_weight(idx, e, wts) for idx, e, _ in self.iter_terms())

    def x_degree(self):
        if not self.coeffs:
            return UNDEFINED
        wts = self.ctx.x_weights
        return max(self._term_weight(idx, e, wts) for idx, e, _ in self.iter_terms())

    def _split(self, weights):
        parts = {}
        for idx, e, c in self.iter_terms():
            d = self._term_weight(idx, e, weights)
            parts.setdefault(d, {})[(idx, e)] = c
        return {d: KForm.from_terms(self.ctx, self.k, t) for d, t in parts.items()}

    def components(self):
        """Quasihomogeneous components keyed by joint degree."""
        return self._split(self.ctx.ring.weights)

    def x_components(self):
        return self._split(self.ctx.x_weights)

    def is_quasihomogeneous(self):
        return len(self.components()) <= 1

    def norm(self, mode="plain"):
        total = mpq(0)
        for p in self.coeffs.values():
            total += self.ctx.norm(p, mode)
        return total

    def is_lambda_free(self):
        return all(self.ctx.is_lambda_free(p) for p in self.coeffs.values())

    def subs(self, values):
        """Substitute rationals for ring variables (index -> value)."""
        return KForm(self.ctx, self.k, {i: p.subs(values) for i, p in self.coeffs.items()})

    def map_coeffs(self, fn):
        res = {}
        for i, p in self.coeffs.items():
            q = fn(p)
            if q:
                res[i] = q
        return KForm._raw(self.ctx, self.k, res)

    def with_ctx(self, ctx: VarContext):
        """Re-home a form into a context with the same x-variables and more
        parameters (coefficients are padded with zero exponents)."""
        if ctx.n != self.ctx.n:
            raise FormError("dimension mismatch")
        return KForm(ctx, self.k, {i: ctx.embed(p) for i, p in self.coeffs.items()})

    # -- calculus -----------------------------------------------------------
    def d(self):
        return ext_d(self)

    def to_json(self):
        return to_json(self)


def wedge(a: KForm, b: KForm) -> KForm:
    if a.ctx.nvars != b.ctx.nvars:
        raise FormError("forms live in different variable contexts")
    if a.k + b.k > a.ctx.n:
        raise FormError(f"wedge degree {a.k}+{b.k} exceeds n={a.ctx.n}")
    res = {}
    for i, p in a.coeffs.items():
        for j, q in b.coeffs.items():
            sign, idx = _merge_sign(i, j)
            if not sign:
                continue
            t = p * q
            if sign < 0:
                t = -t
            cur = res.get(idx)
            res[idx] = t if cur is None else cur + t
    return KForm._raw(a.ctx, a.k + b.k, {i: p for i, p in res.items() if p})


def ext_d(a: KForm) -> KForm:
    """Exterior derivative in the x-variables."""
    n = a.ctx.n
    if a.k == n:
        return KForm.zero(a.ctx, n)
    res = {}
    for idx, p in a.coeffs.items():
        for i in range(n):
            if i in idx:
                continue
            dp = p.diff(i)
            if not dp:
                continue
            sign, new = _insert_sign(i, idx)
            if sign < 0:
                dp = -dp
            cur = res.get(new)
            res[new] = dp if cur is None else cur + dp
    return KForm._raw(a.ctx, a.k + 1, {i: p for i, p in res.items() if p})


def df(ctx: VarContext, f: Poly) -> KForm:
    return ext_d(KForm.function(ctx, f))


def interior_euler(a: KForm) -> KForm:
    """Contraction i_X with the Euler field X = sum w_i x_i d/dx_i."""
    if a.k == 0:
        raise FormError("interior product of a 0-form")
    ctx = a.ctx
    w = ctx.weights.weights
    res = {}
    for idx, p in a.coeffs.items():
        for pos, i in enumerate(idx):
            rest = idx[:pos] + idx[pos + 1:]
            e = [0] * ctx.nvars
            e[i] = 1
            coef = w[i] if pos % 2 == 0 else -w[i]
            t = p.mul_monomial(tuple(e), coef)
            cur = res.get(rest)
            res[rest] = t if cur is None else cur + t
    return KForm._raw(ctx, a.k - 1, {i: p for i, p in res.items() if p})


def _termwise(a: KForm, fn) -> KForm:
    """Multiply each monomial term by fn(x-degree of the term)."""
    wts = a.ctx.x_weights
    res = {}
    for idx, p in a.coeffs.items():
        base = sum((a.ctx.weights.weights[i] for i in idx), mpq(0))
        terms = {}
        for e, c in p.terms.items():
            v = c * fn(term_degree(e, wts) + base)
            if v:
                terms[e] = v
        if terms:
            res[idx] = Poly(a.ctx.nvars, terms, _clean=True)
    return KForm._raw(a.ctx, a.k, res)


def lie_euler(a: KForm) -> KForm:
    """Lie derivative along the Euler field: each monomial term is an
    eigenvector with eigenvalue equal to its x-degree."""
    return _termwise(a, lambda d: d)


def euler_apply(a: KForm, variant="lie") -> KForm:
    if variant == "lie":
        return lie_euler(a)
    if variant == "interior":
        return interior_euler(a)
    raise ValueError(f"unknown variant {variant!r}")


def invert_euler(mu: KForm, variant="inverse_X", r=None) -> KForm:
    """Invert X (or r^-1 X + 1) on top-degree forms, term by term."""
    if mu.k != mu.ctx.n:
        raise FormError("Euler inversion is defined here on top-degree forms only")
    if variant == "inverse_X":
        def fn(d):
            if not d:
                raise FormError("degree-zero term cannot be inverted")
            return 1 / d
    elif variant == "inverse_shifted":
        if r is None:
            raise ValueError("inverse_shifted needs r")
        r = QQ(r)
        def fn(d):
            return 1 / (d / r + 1)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return _termwise(mu, fn)


def primitive(a: KForm, check=True) -> KForm:
    """Euler-homotopy primitive: sum over x-degree components of i_X(a_d)/d.

    Requires da = 0; then d(primitive(a)) == a.
    """
    if a.k < 1:
        raise FormError("primitive needs a form of degree >= 1")
    if check and ext_d(a):
        raise FormError("form is not closed; no primitive exists")
    def inv(d):
        if not d:
            raise FormError("degree-zero component has no Euler primitive")
        return 1 / d
    return interior_euler(_termwise(a, inv))


def is_closed(a: KForm) -> bool:
    return not ext_d(a)


# --------------------------------------------------------------------------
# text / JSON


def _index_text(idx, ctx):
    if not idx:
        return "1"
    return "^".join(f"d{ctx.ring.names[i]}" for i in idx)


def format_form(a: KForm) -> str:
    if not a.coeffs:
        return "0"
    return "; ".join(f"{_index_text(i, a.ctx)}: {a.ctx.format(p)}" for i, p in sorted(a.coeffs.items()))


def parse_form(text: str, ctx: VarContext, k: int | None = None) -> KForm:
    """Parse ``"dx1^dx2: x1^2; dx2: x1 - x2"``-style text.

    Each ``;``-separated entry is ``<wedge of dx's or 1>: <polynomial>``; all
    entries must have the same form degree.
    """
    entries = [e for e in text.split(";") if e.strip()]
    acc = None
    for entry in entries:
        if ":" not in entry:
            raise FormError(f"form entry {entry.strip()!r} needs 'dx..: poly'")
        head, body = entry.split(":", 1)
        head = head.strip()
        if head in ("", "1"):
            factors = []
        else:
            factors = [h.strip() for h in head.split("^")]
        idx = []
        for fac in factors:
            if not fac.startswith("d") or fac[1:] not in ctx.ring.names[:ctx.n]:
                raise FormError(f"unknown differential {fac!r}")
            idx.append(ctx.ring.names.index(fac[1:]))
        piece = KForm.function(ctx, ctx.parse(body))
        for i in reversed(idx):
            piece = wedge(KForm.dx(ctx, i), piece)
        acc = piece if acc is None else acc + piece
    if acc is None:
        if k is None:
            raise FormError("empty form text; cannot infer its degree")
        return KForm.zero(ctx, k)
    if k is not None and acc.k != k:
        raise FormError(f"expected a {k}-form, got a {acc.k}-form")
    return acc


def to_json(a: KForm):
    return {"k": a.k, "terms": [{"dx": list(i), "poly": poly_to_json(p)} for i, p in sorted(a.coeffs.items())]}


def from_json(data, ctx: VarContext) -> KForm:
    return KForm(ctx, data["k"], {tuple(t["dx"]): poly_from_json(t["poly"], ctx.nvars) for t in data["terms"]})


def basis_indices(n, k):
    return list(combinations(range(n), k))
