"""Lie-algebra operations on tensor series: brackets, ad-series, BCH, log-derivatives.

Every letter fed to a Lie series (BCH words, powers of ad X) must have
positive weight, i.e. no term of λ-degree 0 unless a nilpotent parameter
compensates.  That is what makes all sums here finite.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from gmpy2 import mpq

from . import coefficients as co
from .errors import NonPositiveDegreeInput, PoleAtZero
from .lie_core import LieAlgebra
from .series import (
    TensorSeries,
    _by_degree,
    _product_prec,
    constant,
    contract_lambda,
    coordinates,
    differential,
)

__all__ = [
    "commutator",
    "ad",
    "coad",
    "apply_analytic",
    "bch",
    "GroupMap",
    "left_log_derivative",
    "right_log_derivative",
    "ad_star_diffeo",
    "identity_tensor",
    "kks_action",
    "total_action",
]


def commutator(alg: LieAlgebra, x: TensorSeries, xlegs, y: TensorSeries, ylegs) -> TensorSeries:
    """[x^{xlegs}, y^{ylegs}] with polynomial parts multiplied.

    Legs are 0-based labels; x and y must share exactly one.  The result has
    one slot per distinct label, in increasing label order, so labels that
    neither side occupies simply do not appear (e.g. a slot that only ever
    carried a function).
    """
    xlegs, ylegs = tuple(xlegs), tuple(ylegs)
    if len(xlegs) != x.rank or len(ylegs) != y.rank:
        raise ValueError("one leg per slot is required")
    common = set(xlegs) & set(ylegs)
    if len(common) != 1:
        raise ValueError(f"legs {xlegs} and {ylegs} must share exactly one slot")
    if x.space is not y.space:
        raise ValueError("series live in different monomial spaces")
    labels = sorted(set(xlegs) | set(ylegs))
    where = {lab: n for n, lab in enumerate(labels)}
    (c,) = common
    pc = where[c]
    px, py = xlegs.index(c), ylegs.index(c)
    xpos = [where[l] for l in xlegs]
    ypos = [where[l] for l in ylegs]
    rank = len(labels)
    sp = x.space
    prec = _product_prec(x, y)
    ok = sp.ok
    table = alg.table
    out: dict = {}
    yl = _by_degree(y)
    for dx, ix, cx, vx in _by_degree(x):
        base = [0] * rank
        for m, p in enumerate(xpos):
            base[p] = ix[m]
        ax = ix[px]
        for dy, iy, cy, vy in yl:
            if dx + dy > prec:
                break
            row = table[ax][iy[py]]
            if not row:
                continue
            code = cx + cy
            if not ok(code):
                continue
            slots = list(base)
            for m, p in enumerate(ypos):
                slots[p] = iy[m]
            v = vx * vy
            for k, s in row:
                slots[pc] = k
                key = (tuple(slots), code)
                out[key] = out.get(key, 0) + v * s
    return TensorSeries(rank, sp, prec, {k: v for k, v in out.items() if v != 0}, _clean=True)


def ad(alg: LieAlgebra, x: TensorSeries, target: TensorSeries, slot: int) -> TensorSeries:
    """(ad x) acting on one slot of ``target``; x is rank 1."""
    return commutator(alg, x, (slot,), target, tuple(range(target.rank)))


def coad(alg: LieAlgebra, x: TensorSeries, xi: TensorSeries, slot: int = 0) -> TensorSeries:
    """Coadjoint action on a g*-valued slot: <ad*(x)ξ, a> = −<ξ, [x, a]>."""
    sp = x.space
    prec = _product_prec(x, xi)
    ok = sp.ok
    n = alg.dim
    # (c, b) -> [(a, coefficient of e_b in [e_c, e_a])]
    trans: dict = {}
    for c in range(n):
        for a in range(n):
            for b, s in alg.table[c][a]:
                trans.setdefault((c, b), []).append((a, s))
    out: dict = {}
    xl = _by_degree(x)
    for dq, iq, cq, vq in _by_degree(xi):
        b = iq[slot]
        for dx, ix, cx, vx in xl:
            if dx + dq > prec:
                break
            hits = trans.get((ix[0], b))
            if not hits:
                continue
            code = cx + cq
            if not ok(code):
                continue
            v = vx * vq
            for a, s in hits:
                key = (iq[:slot] + (a,) + iq[slot + 1:], code)
                out[key] = out.get(key, 0) - v * s
    return TensorSeries(xi.rank, sp, prec, {k: v for k, v in out.items() if v != 0}, _clean=True)


def _letter_check(x: TensorSeries, what: str):
    if x.terms and x.weight() < 1:
        raise NonPositiveDegreeInput(f"{what} has a term of λ-degree 0 without a nilpotent parameter")


def apply_analytic(alg: LieAlgebra, coeffs, x: TensorSeries, target: TensorSeries,
                   slot: int = 0, dual: bool = False) -> TensorSeries:
    """Σ_m ψ_m (ad x)^m applied to one slot of ``target``.

    ``coeffs`` is a sequence of Taylor coefficients, or a mapping
    {power: coefficient}; a nonzero negative power raises ``PoleAtZero``.
    With ``dual=True`` the slot is g*-valued and ad* is used instead.
    """
    if isinstance(coeffs, dict):
        if any(k < 0 and v != 0 for k, v in coeffs.items()):
            raise PoleAtZero("principal part passed to apply_analytic; cancel poles first")
        top = max((k for k in coeffs), default=-1)
        coeffs = [coeffs.get(m, 0) for m in range(top + 1)]
    coeffs = [mpq(c) for c in coeffs]
    _letter_check(x, "ad-series argument")
    act = (lambda y: coad(alg, x, y, slot)) if dual else (lambda y: ad(alg, x, y, slot))
    acc = None
    term = target
    for m, c in enumerate(coeffs):
        if m:
            term = act(term)
        contribution = term * c
        acc = contribution if acc is None else acc + contribution
        if not term.terms:
            break
    if acc is None:
        return target * 0
    return acc


def identity_tensor(n: int, nvars: int, prec: int, caps=()) -> TensorSeries:
    """Σ_i e_i ⊗ e_i, the identity endomorphism (value slot 0, label slot 1)."""
    return constant({(i, i): 1 for i in range(n)}, nvars, prec, caps)


# ---------------------------------------------------------------------------
# Baker-Campbell-Hausdorff via the Dynkin-Specht-Wever word formula
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def bch_word_coefficients(length: int) -> dict:
    """Coefficients c_w of log(e^X e^Y) in the free associative algebra, words up to ``length``.

    Words are strings over {'x', 'y'}.
    """
    from math import factorial

    # e^X e^Y − 1 as {word: coefficient}
    w1: dict = {}
    for p in range(length + 1):
        for q in range(length + 1 - p):
            if p + q:
                w1["x" * p + "y" * q] = mpq(1, factorial(p) * factorial(q))
    log: dict = {}
    power = dict(w1)
    for k in range(1, length + 1):
        sign = mpq((-1) ** (k + 1), k)
        for w, c in power.items():
            log[w] = log.get(w, 0) + sign * c
        nxt: dict = {}
        for a, ca in power.items():
            for b, cb in w1.items():
                if len(a) + len(b) <= length:
                    nxt[a + b] = nxt.get(a + b, 0) + ca * cb
        power = nxt
    return {w: c for w, c in log.items() if c != 0}


def bch(alg: LieAlgebra, x: TensorSeries, y: TensorSeries, prec: int | None = None) -> TensorSeries:
    """log(exp x · exp y) for rank-1 series with no weight-0 terms.

    Each homogeneous word part is rebuilt from right-normed brackets,
    Z_n = (1/n) Σ_{|w|=n} c_w [w_1, [w_2, ... w_n]], which is exact because
    Z_n is a Lie polynomial.  Words are kept only while their minimal weight
    fits under the truncation.
    """
    if x.rank != 1 or y.rank != 1:
        raise ValueError("bch takes rank-1 series")
    if x.space is not y.space:
        raise ValueError("series live in different monomial spaces")
    for z, name in ((x, "X"), (y, "Y")):
        if z.terms and z.weight() < 1:
            raise NonPositiveDegreeInput(f"bch input {name} has a constant term")
    if prec is None:
        prec = min(x.prec, y.prec)
    x, y = x.truncate(min(prec, x.prec)), y.truncate(min(prec, y.prec))
    if not x.terms:
        return y
    if not y.terms:
        return x
    caps = sum(x.space.caps)
    budget = prec + caps
    wx, wy = x.weight(), y.weight()
    length = budget // min(wx, wy)
    coeffs = bch_word_coefficients(length)
    letters = {"x": x, "y": y}
    cache: dict = {}

    def nested(word):
        v = cache.get(word)
        if v is None:
            if len(word) == 1:
                v = letters[word]
            else:
                v = commutator(alg, letters[word[0]], (0,), nested(word[1:]), (0,))
            cache[word] = v
        return v

    acc = x + y
    for w in sorted(coeffs, key=lambda w: (len(w), w)):
        n = len(w)
        if n < 2:
            continue
        if w.count("x") * wx + w.count("y") * wy > budget:
            continue
        term = nested(w)
        if term.terms:
            acc = acc + term * (coeffs[w] / n)
        elif term.prec < acc.prec:
            acc = acc + term
    return acc


# ---------------------------------------------------------------------------
# formal maps g* -> G in log coordinates
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GroupMap:
    """λ ↦ exp(A(λ)) with A ∈ g ⊗ Ŝ(g)_{≥1}, so the value at 0 is the identity."""

    A: TensorSeries

    def __post_init__(self):
        if self.A.rank != 1:
            raise ValueError("log-coordinates must be a rank-1 series")
        if self.A.terms and self.A.valuation() < 1:
            raise ValueError("a GroupMap must take the value 1 at λ = 0 (no constant term)")

    @property
    def prec(self) -> int:
        return self.A.prec

    @classmethod
    def identity(cls, alg: LieAlgebra, prec: int, caps=()) -> "GroupMap":
        from .series import zero

        return cls(zero(1, alg.dim, prec, caps))

    def inverse(self) -> "GroupMap":
        return GroupMap(-self.A)


def left_log_derivative(alg: LieAlgebra, g: GroupMap) -> TensorSeries:
    """g^{-1} d g = ((1 − e^{−ad A}) / ad A)(dA): value slot 0, derivative slot 1."""
    dA = differential(g.A)
    return apply_analytic(alg, co.dexp_left_coefficients(dA.prec + 1), g.A, dA, slot=0)


def right_log_derivative(alg: LieAlgebra, g: GroupMap) -> TensorSeries:
    """(d g) g^{-1} = ((e^{ad A} − 1) / ad A)(dA): value slot 0, derivative slot 1."""
    dA = differential(g.A)
    return apply_analytic(alg, co.dexp_right_coefficients(dA.prec + 1), g.A, dA, slot=0)


def adjoint(alg: LieAlgebra, g: GroupMap, target: TensorSeries, slot: int, inverse=False) -> TensorSeries:
    """Ad(g)^{±1} on one slot: exp(±ad A)."""
    order = target.prec + sum(target.space.caps) + 1
    return apply_analytic(alg, co.exp_coefficients(order, -1 if inverse else 1), g.A, target, slot)


def ad_star_diffeo(alg: LieAlgebra, g: GroupMap) -> TensorSeries:
    """θ(g): λ ↦ Ad*(g(λ))(λ), as coordinates μ_i = <λ, Ad(g(λ))^{-1} e_i>.

    Returned as a rank-1 series whose slot index is the coordinate index;
    its linear part is the identity.
    """
    sp = g.A.space
    eye = identity_tensor(alg.dim, alg.dim, g.prec, sp.caps)
    moved = adjoint(alg, g, eye, 0, inverse=True)
    return contract_lambda(moved, 0)


def identity_diffeo(n: int, prec: int, caps=()) -> TensorSeries:
    return coordinates(n, prec, caps)


# ---------------------------------------------------------------------------
# g-action on tensor-valued functions on g*
# ---------------------------------------------------------------------------

def kks_action(alg: LieAlgebra, a: int, f: TensorSeries) -> TensorSeries:
    """{a, f} on the polynomial part, a a basis element viewed as a linear function."""
    df = differential(f)
    ea = constant({(a,): 1}, alg.dim, df.prec + 1, f.space.caps)
    k = f.rank
    moved = commutator(alg, ea, (k,), df, tuple(range(k + 1)))
    return contract_lambda(moved, k)


def total_action(alg: LieAlgebra, a: int, x: TensorSeries) -> TensorSeries:
    """Infinitesimal diagonal action of e_a: ad on every slot plus the coadjoint action on λ.

    Zero exactly when x is g-equivariant to first order.
    """
    ea = constant({(a,): 1}, alg.dim, x.prec, x.space.caps)
    acc = kks_action(alg, a, x)
    for s in range(x.rank):
        acc = acc + ad(alg, ea, x, s)
    return acc
