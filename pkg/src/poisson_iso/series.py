"""Truncated tensor series: elements of g^{⊗k} ⊗ Ŝ(g).

A term is keyed by ``(idx, code)``: ``idx`` is a tuple of basis indices, one
per tensor slot, and ``code`` packs an exponent vector into an int (eight bits
per variable) so that multiplying monomials is integer addition.  The first
``nvars`` variables are the coordinates λ_i = <λ, e_i> on g* and carry the
grading; any further variables are nilpotent parameters (dual numbers, flow
time) bounded by per-parameter caps and ignored by the grading.

``prec`` is the degree through which a series is exact: every missing term
has λ-degree > prec.  Binary operations propagate it the way p-adic
precision is propagated, so a residual reported zero "through degree n" is
zero as a formal statement, not an artifact of where things were cut.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import product as _cartesian

from gmpy2 import mpq

from .errors import PrecisionError

__all__ = [
    "MonomialSpace",
    "TensorSeries",
    "space",
    "zero",
    "constant",
    "variable",
    "coordinates",
    "legs",
    "permute_slots",
    "outer",
    "differential",
    "alternate",
    "contract_lambda",
    "contract",
    "substitute",
]

_BITS = 8
_MASK = (1 << _BITS) - 1


class MonomialSpace:
    """Packed exponent vectors for ``nvars`` graded variables plus capped parameters."""

    def __init__(self, nvars: int, caps: tuple[int, ...] = ()):
        self.nvars = nvars
        self.caps = tuple(caps)
        self.width = nvars + len(self.caps)
        self._deg: dict[int, int] = {}
        self._ok: dict[int, bool] = {}

    def __repr__(self):
        return f"MonomialSpace({self.nvars}, caps={self.caps})"

    def encode(self, exps) -> int:
        code = 0
        for i, e in enumerate(exps):
            code |= int(e) << (_BITS * i)
        return code

    def decode(self, code: int) -> tuple[int, ...]:
        return tuple((code >> (_BITS * i)) & _MASK for i in range(self.width))

    def var(self, i: int) -> int:
        return 1 << (_BITS * i)

    def param(self, p: int) -> int:
        return 1 << (_BITS * (self.nvars + p))

    def degree(self, code: int) -> int:
        d = self._deg.get(code)
        if d is None:
            d = sum((code >> (_BITS * i)) & _MASK for i in range(self.nvars))
            self._deg[code] = d
        return d

    def weight(self, code: int) -> int:
        """λ-degree plus total parameter exponent."""
        return self.degree(code) + sum(self.param_exps(code))

    def param_exps(self, code: int) -> tuple[int, ...]:
        return tuple((code >> (_BITS * (self.nvars + p))) & _MASK for p in range(len(self.caps)))

    def ok(self, code: int) -> bool:
        """Parameter exponents within their caps."""
        if not self.caps:
            return True
        v = self._ok.get(code)
        if v is None:
            v = all(e <= c for e, c in zip(self.param_exps(code), self.caps))
            self._ok[code] = v
        return v

    def lam_part(self, code: int) -> int:
        return code & ((1 << (_BITS * self.nvars)) - 1)

    def param_part(self, code: int) -> int:
        return code >> (_BITS * self.nvars) << (_BITS * self.nvars)


def space(nvars: int, caps=()) -> MonomialSpace:
    """The shared space for (nvars, caps); spaces are compared by identity."""
    return _space(int(nvars), tuple(int(c) for c in caps))


@lru_cache(maxsize=None)
def _space(nvars: int, caps: tuple[int, ...]) -> MonomialSpace:
    return MonomialSpace(nvars, caps)


class TensorSeries:
    """Sparse exact series with values in g^{⊗rank}; treat as immutable."""

    __slots__ = ("rank", "space", "prec", "terms")

    def __init__(self, rank: int, space_: MonomialSpace, prec: int, terms=None, _clean=False):
        self.rank = rank
        self.space = space_
        self.prec = prec
        if terms is None:
            terms = {}
        elif not _clean:
            deg, ok = space_.degree, space_.ok
            terms = {k: mpq(v) for k, v in terms.items() if v != 0 and deg(k[1]) <= prec and ok(k[1])}
        self.terms = terms

    # -- basic protocol -------------------------------------------------
    @property
    def nvars(self) -> int:
        return self.space.nvars

    def __repr__(self):
        return f"TensorSeries(rank={self.rank}, prec={self.prec}, nterms={len(self.terms)})"

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def _check(self, other: "TensorSeries"):
        if not isinstance(other, TensorSeries):
            raise TypeError(f"expected TensorSeries, got {type(other).__name__}")
        if other.rank != self.rank or other.space is not self.space:
            raise ValueError(
                f"incompatible series: rank {self.rank}/{other.rank}, {self.space}/{other.space}")

    def __add__(self, other):
        self._check(other)
        prec = min(self.prec, other.prec)
        out = _restrict(self.terms, self.space, prec)
        deg = self.space.degree
        for k, v in other.terms.items():
            if deg(k[1]) > prec:
                continue
            s = out.get(k)
            s = v if s is None else s + v
            if s == 0:
                out.pop(k, None)
            else:
                out[k] = s
        return TensorSeries(self.rank, self.space, prec, out, _clean=True)

    def __neg__(self):
        return TensorSeries(self.rank, self.space, self.prec,
                            {k: -v for k, v in self.terms.items()}, _clean=True)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        if isinstance(scalar, TensorSeries):
            raise TypeError("use outer() or commutator() for series products")
        c = mpq(scalar)
        if c == 0:
            return TensorSeries(self.rank, self.space, self.prec)
        return TensorSeries(self.rank, self.space, self.prec,
                            {k: v * c for k, v in self.terms.items()}, _clean=True)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TensorSeries):
            return NotImplemented
        return (self.rank == other.rank and self.space is other.space
                and self.prec == other.prec and self.terms == other.terms)

    __hash__ = None

    # -- grading --------------------------------------------------------
    def valuation(self) -> int:
        """Lowest λ-degree present; ``prec + 1`` for the zero series."""
        deg = self.space.degree
        return min((deg(k[1]) for k in self.terms), default=self.prec + 1)

    def weight(self) -> int:
        """Lowest λ-degree plus parameter exponent present."""
        w = self.space.weight
        return min((w(k[1]) for k in self.terms), default=self.prec + 1 + sum(self.space.caps))

    def degrees(self) -> list[int]:
        deg = self.space.degree
        return sorted({deg(k[1]) for k in self.terms})

    def truncate(self, prec: int) -> "TensorSeries":
        if prec > self.prec:
            raise PrecisionError(f"series is only valid through degree {self.prec}, asked {prec}")
        return TensorSeries(self.rank, self.space, prec, _restrict(self.terms, self.space, prec), _clean=True)

    def homogeneous(self, d: int) -> "TensorSeries":
        """Pure-degree-d component (exact: precision is kept)."""
        if d > self.prec:
            raise PrecisionError(f"degree {d} is beyond precision {self.prec}")
        deg = self.space.degree
        return TensorSeries(self.rank, self.space, self.prec,
                            {k: v for k, v in self.terms.items() if deg(k[1]) == d}, _clean=True)

    def drop_below(self, d: int) -> "TensorSeries":
        deg = self.space.degree
        return TensorSeries(self.rank, self.space, self.prec,
                            {k: v for k, v in self.terms.items() if deg(k[1]) >= d}, _clean=True)

    def is_zero(self, through: int | None = None) -> bool:
        """True when every term of degree <= ``through`` (default: prec) vanishes."""
        if through is None:
            return not self.terms
        if through > self.prec:
            raise PrecisionError(f"cannot certify degree {through}; valid through {self.prec}")
        deg = self.space.degree
        return all(deg(k[1]) > through for k in self.terms)

    def lowest_term(self):
        """First term in canonical order, or None."""
        if not self.terms:
            return None
        key = min(self.terms, key=self._sort_key)
        return key, self.terms[key]

    def with_prec(self, prec: int) -> "TensorSeries":
        """Reinterpret an exact (polynomial) series at another precision.

        Only legal when the caller knows the series is exact, e.g. a constant
        tensor or a linear coordinate function.
        """
        return TensorSeries(self.rank, self.space, prec, self.terms)

    # -- parameters -----------------------------------------------------
    def extend_params(self, caps: tuple[int, ...]) -> "TensorSeries":
        """Embed into a space with more nilpotent parameters (appended)."""
        caps = tuple(caps)
        if caps[: len(self.space.caps)] != self.space.caps:
            raise ValueError("new caps must extend the existing ones")
        return TensorSeries(self.rank, space(self.nvars, caps), self.prec, self.terms, _clean=True)

    def eval_params(self, values) -> "TensorSeries":
        """Substitute scalar values for every parameter and drop them."""
        sp = self.space
        if not sp.caps:
            return self
        values = [mpq(v) for v in values]
        target = space(sp.nvars)
        out: dict = {}
        for (idx, code), c in self.terms.items():
            f = c
            for v, e in zip(values, sp.param_exps(code)):
                if e:
                    f = f * v ** e
            if f == 0:
                continue
            key = (idx, sp.lam_part(code))
            s = out.get(key, 0) + f
            if s == 0:
                out.pop(key, None)
            else:
                out[key] = s
        return TensorSeries(self.rank, target, self.prec, out, _clean=True)

    def param_coefficient(self, exps) -> "TensorSeries":
        """Coefficient of a parameter monomial, as a parameter-free series."""
        sp = self.space
        exps = tuple(exps)
        target = space(sp.nvars)
        out = {(idx, sp.lam_part(code)): c for (idx, code), c in self.terms.items()
               if sp.param_exps(code) == exps}
        return TensorSeries(self.rank, target, self.prec, out, _clean=True)

    # -- rendering ------------------------------------------------------
    def _sort_key(self, key):
        idx, code = key
        exps = self.space.decode(code)
        return (self.space.degree(code), tuple(-e for e in exps), idx)

    def render(self, labels=None) -> str:
        """Canonical text form: one ``e_i⊗e_j * monomial : p/q`` line per term, graded-lex."""
        lines = []
        for key in sorted(self.terms, key=self._sort_key):
            idx, code = key
            slot = "⊗".join(f"e_{labels[i] if labels else i}" for i in idx) or "1"
            lines.append(f"{slot} * {self.render_monomial(code)} : {self.terms[key]}")
        return "\n".join(lines)

    def render_monomial(self, code: int) -> str:
        exps = self.space.decode(code)
        parts = []
        for i, e in enumerate(exps):
            if not e:
                continue
            name = f"l{i}" if i < self.nvars else f"p{i - self.nvars}"
            parts.append(name if e == 1 else f"{name}^{e}")
        return "*".join(parts) or "1"

    def coefficient(self, idx, exps) -> mpq:
        return self.terms.get((tuple(idx), self.space.encode(exps)), mpq(0))


def _restrict(terms, sp, prec):
    deg = sp.degree
    return {k: v for k, v in terms.items() if deg(k[1]) <= prec}


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def zero(rank: int, nvars: int, prec: int, caps=()) -> TensorSeries:
    return TensorSeries(rank, space(nvars, tuple(caps)), prec)


def constant(tensor: dict, nvars: int, prec: int, caps=()) -> TensorSeries:
    """Constant series from ``{idx_tuple: coefficient}``; rank taken from the keys."""
    rank = len(next(iter(tensor))) if tensor else 0
    return TensorSeries(rank, space(nvars, tuple(caps)), prec,
                        {(tuple(idx), 0): c for idx, c in tensor.items()})


def variable(i: int, nvars: int, prec: int, caps=()) -> TensorSeries:
    """The coordinate function λ ↦ λ_i as a rank-0 series."""
    sp = space(nvars, tuple(caps))
    return TensorSeries(0, sp, prec, {((), sp.var(i)): mpq(1)})


def coordinates(nvars: int, prec: int, caps=()) -> TensorSeries:
    """Σ_i e_i ⊗ λ_i: the identity map, or the generic point of g in x-coordinates."""
    sp = space(nvars, tuple(caps))
    return TensorSeries(1, sp, prec, {((i,), sp.var(i)): mpq(1) for i in range(nvars)})


def parameter(p: int, nvars: int, prec: int, caps) -> TensorSeries:
    sp = space(nvars, tuple(caps))
    return TensorSeries(0, sp, prec, {((), sp.param(p)): mpq(1)})


# ---------------------------------------------------------------------------
# slot bookkeeping: the only place tensor legs get moved around
# ---------------------------------------------------------------------------

def permute_slots(x: TensorSeries, order) -> TensorSeries:
    """Result slot j holds the old slot ``order[j]``."""
    order = tuple(order)
    if sorted(order) != list(range(x.rank)):
        raise ValueError(f"{order} is not a permutation of {x.rank} slots")
    return TensorSeries(x.rank, x.space, x.prec,
                        {(tuple(idx[o] for o in order), code): c for (idx, code), c in x.terms.items()},
                        _clean=True)


def legs(x: TensorSeries, *positions: int) -> TensorSeries:
    """Leg notation x^{p1,...,pk} with 1-based positions: slot m moves to ``positions[m]``.

    ``legs(r, 2, 1)`` is r^{2,1}; ``legs(x, 2, 3, 1)`` sends e_a⊗e_b⊗e_c to e_c⊗e_a⊗e_b.
    """
    if len(positions) != x.rank:
        raise ValueError("one position per slot is required")
    order = [0] * x.rank
    for m, p in enumerate(positions):
        order[p - 1] = m
    return permute_slots(x, order)


def _product_prec(a: TensorSeries, b: TensorSeries) -> int:
    p = min(a.valuation() + b.prec, b.valuation() + a.prec)
    return min(p, max(a.prec, b.prec))


def _by_degree(x: TensorSeries):
    deg = x.space.degree
    return sorted(((deg(code), idx, code, c) for (idx, code), c in x.terms.items()),
                  key=lambda t: t[0])


def outer(a: TensorSeries, b: TensorSeries) -> TensorSeries:
    """a ⊗ b with the polynomial parts multiplied (slots of a first)."""
    if a.space is not b.space:
        raise ValueError("series live in different monomial spaces")
    sp = a.space
    prec = _product_prec(a, b)
    ok = sp.ok
    out: dict = {}
    bl = _by_degree(b)
    for da, ia, ca, va in _by_degree(a):
        for db, ib, cb, vb in bl:
            if da + db > prec:
                break
            code = ca + cb
            if not ok(code):
                continue
            key = (ia + ib, code)
            out[key] = out.get(key, 0) + va * vb
    return TensorSeries(a.rank + b.rank, sp, prec, {k: v for k, v in out.items() if v != 0}, _clean=True)


# ---------------------------------------------------------------------------
# calculus on the polynomial part
# ---------------------------------------------------------------------------

def differential(f: TensorSeries) -> TensorSeries:
    """Append a g slot holding the gradient: d(α⊗f) = Σ_i α ⊗ e_i ⊗ ∂f/∂λ_i."""
    sp = f.space
    out = {}
    for (idx, code), c in f.terms.items():
        for i in range(sp.nvars):
            e = (code >> (_BITS * i)) & _MASK
            if e:
                out[(idx + (i,), code - sp.var(i))] = c * e
    return TensorSeries(f.rank + 1, sp, f.prec - 1, out, _clean=True)


def cyclic_shift(x: TensorSeries) -> TensorSeries:
    """x^{2,...,n,1}: slot m moves to position m+1, the last slot wraps to the front."""
    n = x.rank
    return legs(x, *[(m + 1) % n + 1 for m in range(n)])


def alternate(x: TensorSeries) -> TensorSeries:
    """Signed cyclic sum Σ_j sgn(c^j) x^{c^j} over the n cyclic shifts c^j.

    For odd rank the signs are all +1 and this is the plain cyclic sum; on
    ∧^{n-1}(g) ⊗ g it is the antisymmetrization map to ∧^n(g).  For rank 2 it
    is x − x^{2,1}.
    """
    n = x.rank
    if n < 1:
        raise ValueError("alternate needs at least one slot")
    sign = -1 if n % 2 == 0 else 1
    acc = x
    cur = x
    for j in range(1, n):
        cur = cyclic_shift(cur)
        acc = acc + (cur if sign ** j == 1 else -cur)
    return acc


def contract_lambda(x: TensorSeries, slot: int) -> TensorSeries:
    """Pair a g slot with λ: e_i in ``slot`` becomes the factor λ_i of the polynomial part."""
    sp = x.space
    out: dict = {}
    for (idx, code), c in x.terms.items():
        i = idx[slot]
        key = (idx[:slot] + idx[slot + 1:], code + sp.var(i))
        out[key] = out.get(key, 0) + c
    return TensorSeries(x.rank - 1, sp, x.prec + 1, {k: v for k, v in out.items() if v != 0}, _clean=True)


def contract(x: TensorSeries, sx: int, y: TensorSeries, sy: int) -> TensorSeries:
    """Σ_i x[..i..] y[..i..] over slot ``sx`` of x and ``sy`` of y.

    One side is read as g-valued and the other as g*-valued, so this is the
    duality pairing.  Remaining slots: those of x, then those of y.
    """
    if x.space is not y.space:
        raise ValueError("series live in different monomial spaces")
    sp = x.space
    prec = _product_prec(x, y)
    ok = sp.ok
    by_index: dict = {}
    for d, idx, code, c in _by_degree(y):
        by_index.setdefault(idx[sy], []).append((d, idx[:sy] + idx[sy + 1:], code, c))
    out: dict = {}
    for dx, ix, cx, vx in _by_degree(x):
        rest_x = ix[:sx] + ix[sx + 1:]
        for dy, ry, cy, vy in by_index.get(ix[sx], ()):
            if dx + dy > prec:
                break
            code = cx + cy
            if not ok(code):
                continue
            key = (rest_x + ry, code)
            out[key] = out.get(key, 0) + vx * vy
    return TensorSeries(x.rank + y.rank - 2, sp, prec, {k: v for k, v in out.items() if v != 0}, _clean=True)


def substitute(f: TensorSeries, sigma: TensorSeries) -> TensorSeries:
    """f ∘ σ: replace λ_i by the rank-0 component σ_i (slot index i of the rank-1 ``sigma``).

    σ must have no constant term.  Parameters of f ride along unchanged; σ
    may carry its own parameters provided both share one monomial space.
    """
    if sigma.rank != 1:
        raise ValueError("sigma must be a rank-1 series of coordinates")
    if f.space is not sigma.space:
        if not f.space.caps and sigma.space.caps:
            f = f.extend_params(sigma.space.caps)
        elif not sigma.space.caps and f.space.caps:
            sigma = sigma.extend_params(f.space.caps)
        else:
            raise ValueError("series live in different monomial spaces")
    sp = f.space
    n = sp.nvars
    if sigma.valuation() < 1:
        raise ValueError("substitution needs a map without constant term")
    comps = [TensorSeries(0, sp, sigma.prec, {((), code): c for (idx, code), c in sigma.terms.items()
                                              if idx[0] == i}, _clean=True) for i in range(n)]
    vs = sigma.valuation()
    target = f.prec
    positive = [sp.degree(code) for (_, code) in f.terms if sp.degree(code) > 0]
    if positive:
        target = min(target, (min(positive) - 1) * vs + sigma.prec)
    one = TensorSeries(0, sp, target, {((), 0): mpq(1)}, _clean=True)
    powers: dict = {}

    def power(i, e):
        key = (i, e)
        p = powers.get(key)
        if p is None:
            p = one if e == 0 else _truncated(outer(power(i, e - 1), comps[i]), target)
            powers[key] = p
        return p

    mono_cache: dict = {}

    def mono(lam_code):
        m = mono_cache.get(lam_code)
        if m is None:
            exps = sp.decode(lam_code)[:n]
            m = one
            for i, e in enumerate(exps):
                if e:
                    m = _truncated(outer(m, power(i, e)), target)
            mono_cache[lam_code] = m
        return m

    prec = f.prec
    for (_, code) in f.terms:
        lam = sp.lam_part(code)
        if lam:
            prec = min(prec, mono(lam).prec)
    deg, ok = sp.degree, sp.ok
    out: dict = {}
    for (idx, code), c in f.terms.items():
        lam = sp.lam_part(code)
        par = code - lam
        for (_, mcode), mc in mono(lam).terms.items():
            new = mcode + par
            if deg(new) > prec or not ok(new):
                continue
            key = (idx, new)
            out[key] = out.get(key, 0) + c * mc
    return TensorSeries(f.rank, sp, prec, {k: v for k, v in out.items() if v != 0}, _clean=True)


def _truncated(x: TensorSeries, prec: int) -> TensorSeries:
    if x.prec <= prec:
        return x
    return x.truncate(prec)


def homogeneous_monomials(nvars: int, d: int):
    """Exponent vectors of degree d in graded-lex order (largest first exponent first)."""
    out = [e for e in _cartesian(range(d + 1), repeat=nvars) if sum(e) == d]
    out.sort(key=lambda e: tuple(-x for x in e))
    return out
