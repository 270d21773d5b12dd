"""Poisson brackets on g*, on G in log-coordinates, and the isomorphism g* → G*.

G* only appears through log-coordinates ξ (g*-valued series) and the
morphisms L, R : G* → G.  Functions on G are written in the coordinates
x = log g; a "generic point" x is the coordinate series Σ e_i ⊗ y_i, with
the y_i stored in the same graded variables as λ.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpq

from . import coefficients as co
from .errors import NotFactorizable, NotHamiltonian
from .gauge import HamElement, act_on_solution, certify
from .lie_core import QuasitriangularData
from .lie_series import GroupMap, ad_star_diffeo, adjoint, apply_analytic, bch, coad, commutator
from .rmatrix import lambda_vee, rho_am, rho_am_nu, rho_fm_of_x
from .series import (
    TensorSeries,
    constant,
    contract,
    contract_lambda,
    coordinates,
    differential,
    space,
    substitute,
)

__all__ = [
    "BracketTable",
    "kks_bracket",
    "sts_bracket_exp",
    "sts_bracket_raw",
    "dl_dr_differentials",
    "fm2_bracket",
    "a_map",
    "a_map_adjoint",
    "b_log",
    "invert_b",
    "g_star",
    "pushforward_check",
    "equivariance_check",
    "fm_identity_check",
    "dual_basis",
]


@dataclass
class BracketTable:
    """Scalar series per ordered pair of dual-basis indices, tagged with the bracket's name."""

    kind: str
    entries: dict = field(default_factory=dict)

    def is_zero(self, through: int | None = None) -> bool:
        return all(v.is_zero(through) for v in self.entries.values())

    def first_nonzero(self):
        for key in sorted(self.entries):
            v = self.entries[key]
            if v.terms:
                return key, v.lowest_term()
        return None


def _tensor(qt_tensor: dict, n: int, prec: int, caps=(), rank: int = 2) -> TensorSeries:
    if not qt_tensor:
        return TensorSeries(rank, space(n, caps), prec)
    return constant(qt_tensor, n, prec, caps)


def dual_basis(n: int, i: int, prec: int, caps=()) -> TensorSeries:
    """The constant g*-valued series ε^i."""
    return constant({(i,): 1}, n, prec, caps)


# ---------------------------------------------------------------------------
# brackets
# ---------------------------------------------------------------------------

def kks_bracket(alg, f: TensorSeries, h: TensorSeries) -> TensorSeries:
    """{f, h}(λ) = <λ, [df(λ), dh(λ)]>."""
    if f.rank or h.rank:
        raise ValueError("brackets act on scalar series")
    df, dh = differential(f), differential(h)
    return contract_lambda(commutator(alg, df, (0,), dh, (0,)), 0)


def _pair(u: TensorSeries, v: TensorSeries, T: TensorSeries) -> TensorSeries:
    """<u ⊗ v, T> for g*-valued u, v and a rank-2 T."""
    return contract(v, 0, contract(u, 0, T, 0), 0)


def sts_bracket_exp(qt: QuasitriangularData, xi: int, eta: int, prec: int) -> TensorSeries:
    """{F_ξ, F_η}_G at g = exp(x) as a polynomial in the coordinates of x.

    <ad*(x)ξ ⊗ ad*(x)η, (id ⊗ φ(ad x))(t) − r0> − <ad*(x)ξ ⊗ η, t>.

    The sign of r0 is the one produced by the defining bracket
    ``sts_bracket_raw`` (since d_R − d_L = −ad*(x)ξ on F_ξ).
    """
    alg = qt.alg
    n = alg.dim
    x = coordinates(n, prec)
    t = _tensor(qt.t, n, prec)
    T = apply_analytic(alg, co.phi_coefficients(prec), x, t, slot=1) - _tensor(qt.r0, n, prec)
    u = coad(alg, x, dual_basis(n, xi, prec))
    v = coad(alg, x, dual_basis(n, eta, prec))
    return _pair(u, v, T) - _pair(u, dual_basis(n, eta, prec), t)


def dl_dr_differentials(qt: QuasitriangularData, xi, x: TensorSeries):
    """(d_L F_ξ, d_R F_ξ) at exp(x): f(±½ ad* x)(ξ) with f(z) = z e^z / sinh z.

    ``xi`` is a dual-basis index or a g*-valued series.
    """
    alg = qt.alg
    if isinstance(xi, int):
        xi = dual_basis(alg.dim, xi, x.prec, x.space.caps)
    order = x.prec + sum(x.space.caps) + 1
    dl = apply_analytic(alg, co.f_coefficients(order, mpq(1, 2)), x, xi, dual=True)
    dr = apply_analytic(alg, co.f_coefficients(order, mpq(-1, 2)), x, xi, dual=True)
    return dl, dr


def sts_bracket_raw(qt: QuasitriangularData, xi: int, eta: int, prec: int) -> TensorSeries:
    """<(d_R − d_L)F_ξ ⊗ d_L F_η, r> + <(d_R − d_L)F_ξ ⊗ d_R F_η, r^{21}> at exp(x)."""
    n = qt.alg.dim
    x = coordinates(n, prec)
    lx, rx = dl_dr_differentials(qt, xi, x)
    ly, ry = dl_dr_differentials(qt, eta, x)
    diff = rx - lx
    return _pair(diff, ly, _tensor(qt.r, n, prec)) + _pair(diff, ry, _tensor(qt.r21, n, prec))


def fm2_bracket(qt: QuasitriangularData, f: TensorSeries, h: TensorSeries) -> TensorSeries:
    """<df ⊗ dh, (ad x ⊗ ½ ad x coth(½ ad x))(t) − (ad x)^{⊗2}(r0)> for functions of x.

    The same bracket as ``sts_bracket_exp``, written for arbitrary functions.
    """
    alg = qt.alg
    n = alg.dim
    prec = min(f.prec, h.prec)
    x = coordinates(n, prec)
    t = _tensor(qt.t, n, prec)
    r0 = _tensor(qt.r0, n, prec)
    order = prec + 1
    T = apply_analytic(alg, co.z_coth_coefficients(order), x, t, slot=1)
    T = apply_analytic(alg, [0, 1], x, T, slot=0)
    T = T - apply_analytic(alg, [0, 1], x, apply_analytic(alg, [0, 1], x, r0, slot=0), slot=1)
    return _pair(differential(f), differential(h), T)


# ---------------------------------------------------------------------------
# the maps a, b and g*
# ---------------------------------------------------------------------------

def a_map(qt: QuasitriangularData, g: GroupMap) -> TensorSeries:
    """log a(λ) = log(g(λ) e^{λ^∨} g(λ)^{-1}), via two BCH products."""
    alg = qt.alg
    lv = lambda_vee(qt, g.prec + 1, g.A.space.caps)
    inner = bch(alg, lv, -g.A, g.prec + 1)
    return bch(alg, g.A, inner, g.prec + 1)


def a_map_adjoint(qt: QuasitriangularData, g: GroupMap) -> TensorSeries:
    """log a(λ) = Ad(g(λ))(λ^∨): the closed form, for cross-checking ``a_map``."""
    lv = lambda_vee(qt, g.prec + 1, g.A.space.caps)
    return adjoint(qt.alg, g, lv, 0)


def _L(qt, xi: TensorSeries) -> TensorSeries:
    return contract(xi, 0, _tensor(qt.r, xi.nvars, xi.prec, xi.space.caps), 0)


def _R(qt, xi: TensorSeries) -> TensorSeries:
    return -contract(xi, 0, _tensor(qt.r, xi.nvars, xi.prec, xi.space.caps), 1)


def b_log(qt: QuasitriangularData, xi: TensorSeries) -> TensorSeries:
    """log b(exp ξ) = log(exp L(ξ) · exp(−R(ξ))): L and R are Lie morphisms, so exp commutes with them."""
    if xi.rank != 1:
        raise ValueError("ξ is a rank-1 g*-valued series")
    return bch(qt.alg, _L(qt, xi), -_R(qt, xi))


def _t_inverse_series(qt, n, prec, caps=()):
    if not qt.factorizable:
        raise NotFactorizable(f"t is degenerate for {qt.name}; b cannot be inverted")
    inv = qt.t_inverse
    return constant({(b, a): inv[b][a] for b in range(n) for a in range(n) if inv[b][a] != 0},
                    n, prec, caps)


def invert_b(qt: QuasitriangularData, X: TensorSeries) -> TensorSeries:
    """The ξ with b_log(ξ) = X, by ξ ← T^{-1}(X − (b_log(ξ) − Tξ)), T = t-contraction.

    Each round fixes one more degree, so prec rounds are exact.
    """
    n = qt.alg.dim
    tinv = _t_inverse_series(qt, n, X.prec, X.space.caps)
    t = _tensor(qt.t, n, X.prec, X.space.caps)
    xi = contract(X, 0, tinv, 0)
    for _ in range(X.prec + 1):
        nonlinear = b_log(qt, xi) - contract(xi, 0, t, 0)
        new = contract(X - nonlinear, 0, tinv, 0)
        if new == xi:
            break
        xi = new
    return xi


def g_star(qt: QuasitriangularData, g: GroupMap) -> TensorSeries:
    """log-coordinates of g*(λ) ∈ G*: b^{-1}(a(λ))."""
    if not qt.factorizable:
        raise NotFactorizable(f"t is degenerate for {qt.name}; g* needs b to be invertible")
    return invert_b(qt, a_map(qt, g))


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

def _components(X: TensorSeries) -> list[TensorSeries]:
    n = X.nvars
    return [TensorSeries(0, X.space, X.prec,
                         {((), code): c for (idx, code), c in X.terms.items() if idx[0] == i}, _clean=True)
            for i in range(n)]


def pushforward_check(qt: QuasitriangularData, g: GroupMap, through: int | None = None) -> BracketTable:
    """{f_ξ, f_η}_{g*} + {F_ξ, F_η}_G ∘ log a for every pair of dual-basis indices.

    f_ξ = F_ξ ∘ a = <ξ, log a(λ)>.  With {f, h}(λ) = <λ, [df, dh]> and the
    STS bracket as written, already the linear parts satisfy
    {F_ξ, F_η}_G = −{f_ξ, f_η} (invariance of t), so a carries the
    Lie-Poisson structure to the STS structure with the opposite sign; the
    residual is zero exactly when it does so to all orders.  Entries are
    truncated to ``through`` (default: where both sides are valid).
    """
    alg = qt.alg
    n = alg.dim
    X = a_map(qt, g)
    f = _components(X)
    table = BracketTable("pushforward")
    for i in range(n):
        for j in range(n):
            left = kks_bracket(alg, f[i], f[j])
            right = substitute(sts_bracket_exp(qt, i, j, X.prec), X)
            res = left + right
            if through is not None:
                res = res.truncate(min(through, res.prec))
            table.entries[(i, j)] = res
    return table


def equivariance_check(qt: QuasitriangularData, alpha, g: GroupMap) -> TensorSeries:
    """g*_{α*g}(λ) − g*_g(θ(α)(λ)); α must be certified Hamiltonian."""
    if isinstance(alpha, HamElement):
        if not alpha.certified_ham:
            raise NotHamiltonian("gauge element is not certified Hamiltonian")
    else:
        alpha = certify(qt.alg, alpha)
    moved = act_on_solution(qt.alg, alpha, g)
    return g_star(qt, moved) - substitute(g_star(qt, g), ad_star_diffeo(qt.alg, alpha.g))


def fm_identity_check(qt: QuasitriangularData, g: GroupMap, nu, prec: int | None = None):
    """(ρ_AM − ρ_AM^ν)(θ(g)(λ)) − ρ_FM(g*(λ)) with x̄ = log(L(g*) R(g*)^{-1}).

    Returns (residual, lhs, rhs).
    """
    if not qt.factorizable:
        raise NotFactorizable(f"t is degenerate for {qt.name}")
    if prec is None:
        prec = g.prec
    xbar = b_log(qt, g_star(qt, g))
    xbar = xbar.truncate(min(prec, xbar.prec))
    lhs_series = rho_am(qt, prec).value - rho_am_nu(qt, nu, prec).value
    lhs = substitute(lhs_series, ad_star_diffeo(qt.alg, g))
    rhs = rho_fm_of_x(qt, xbar, nu).value
    return lhs - rhs, lhs, rhs
