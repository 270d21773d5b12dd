"""The group Map₀(g*, G) of formal maps with g(0) = 1, its Hamiltonian subgroup, and exp_*.

Group law: (g1 * g2)(λ) = g2(θ(g1)(λ)) g1(λ), where θ(g)(λ) = Ad*(g(λ))(λ).
In log-coordinates that is bch(A2 ∘ θ(g1), A1).
"""
from __future__ import annotations

from dataclasses import dataclass

from . import coefficients as co
from .errors import NotHamiltonian
from .lie_core import LieAlgebra
from .lie_series import (
    GroupMap,
    ad_star_diffeo,
    apply_analytic,
    bch,
    commutator,
    left_log_derivative,
)
from .series import (
    TensorSeries,
    alternate,
    contract_lambda,
    differential,
    legs,
    space,
    substitute,
)

__all__ = [
    "HamElement",
    "star_product",
    "ham_residual",
    "lie_residual",
    "exp_star",
    "infinitesimal_action",
    "act_on_solution",
    "certify",
    "commutator_term",
]


@dataclass(frozen=True, eq=False)
class HamElement:
    """A GroupMap together with its cached membership certificate for the Hamiltonian subgroup."""

    g: GroupMap
    certified_ham: bool

    @property
    def A(self) -> TensorSeries:
        return self.g.A


def star_product(alg: LieAlgebra, g1: GroupMap, g2: GroupMap) -> GroupMap:
    """(g1 * g2)(λ) = g2(Ad*(g1(λ))(λ)) · g1(λ)."""
    if g1.A.space is not g2.A.space:
        raise ValueError("group elements live in different monomial spaces")
    prec = min(g1.prec, g2.prec)
    moved = substitute(g2.A, ad_star_diffeo(alg, g1))
    return GroupMap(bch(alg, moved, g1.A, prec))


def commutator_term(alg, K: TensorSeries) -> TensorSeries:
    """<id ⊗ id ⊗ λ, [K^{23}, K^{13}]> for a rank-2 log-derivative K.

    The order of the bracket is the one compatible with θ(g)(λ) = Ad*(g(λ))(λ)
    being a left action: with it the Hamiltonian maps are closed under *.
    """
    return contract_lambda(commutator(alg, K, (1, 2), K, (0, 2)), 2)


def ham_residual(alg: LieAlgebra, g: GroupMap) -> TensorSeries:
    """g1^{-1}d2(g1) − g2^{-1}d1(g2) + <id⊗id⊗λ, [g2^{-1}d3 g2, g1^{-1}d3 g1]>.

    Zero exactly on the Hamiltonian subgroup.  Valid through degree prec − 1.
    """
    K = left_log_derivative(alg, g)
    return K - legs(K, 2, 1) + commutator_term(alg, K)


def lie_residual(v: TensorSeries) -> TensorSeries:
    """Alt(dv) = dv − dv^{21}: the linearization of ``ham_residual`` at the identity."""
    return alternate(differential(v))


def certify(alg: LieAlgebra, g: GroupMap) -> HamElement:
    res = ham_residual(alg, g)
    if not res.is_zero():
        raise NotHamiltonian(f"Hamiltonian residual has leading term {res.lowest_term()}")
    return HamElement(g, True)


def _integrate_param(x: TensorSeries, p: int) -> TensorSeries:
    """∫_0^s in the parameter p: s^k ↦ s^{k+1}/(k+1); terms pushed past the cap are dropped."""
    sp = x.space
    step = sp.param(p)
    cap = sp.caps[p]
    out = {}
    for (idx, code), c in x.terms.items():
        k = sp.param_exps(code)[p]
        if k + 1 > cap:
            continue
        out[(idx, code + step)] = c / (k + 1)
    return TensorSeries(x.rank, sp, x.prec, out, _clean=True)


def exp_star(alg: LieAlgebra, v: TensorSeries, check: bool = True) -> HamElement:
    """Exponential of the Hamiltonian Lie algebra element v (Alt(dv) = 0, no constant term).

    The one-parameter subgroup Γ(s) satisfies Γ(s + ε) = exp(εv) * Γ(s),
    i.e. Γ' = (ad Γ / (e^{ad Γ} − 1))(v ∘ θ(Γ)).  Γ is built as a series in
    a nilpotent flow parameter s: every power of s brings at least one
    λ-degree, so the Picard iteration is exact after prec + 1 rounds.
    """
    if v.rank != 1:
        raise ValueError("a Lie algebra element is a rank-1 series")
    if v.terms and v.valuation() < 1:
        raise NotHamiltonian("Lie algebra elements must vanish at λ = 0")
    if check:
        res = lie_residual(v)
        if not res.is_zero():
            raise NotHamiltonian(f"Alt(dv) != 0: leading term {res.lowest_term()}")
    prec = v.prec
    if not v.terms or alg.is_abelian:
        return HamElement(GroupMap(v), True)
    caps = v.space.caps
    p = len(caps)
    vs = v.extend_params(caps + (prec,))
    coeffs = co.inverse_dexp_right_coefficients(prec + sum(caps) + prec + 1)
    gamma = TensorSeries(1, vs.space, prec)
    for _ in range(prec + 1):
        moved = substitute(vs, ad_star_diffeo(alg, GroupMap(gamma)))
        rate = apply_analytic(alg, coeffs, gamma, moved, slot=0)
        new = _integrate_param(rate, p)
        if new == gamma:
            break
        gamma = new
    # evaluate the flow time at s = 1, keeping any other parameters symbolic
    A = _eval_last_param(gamma, caps)
    return HamElement(GroupMap(A), True)


def _eval_last_param(x: TensorSeries, caps) -> TensorSeries:
    sp = x.space
    target = space(sp.nvars, tuple(caps))
    shift = 8 * (sp.nvars + len(caps))
    keep = (1 << shift) - 1
    out: dict = {}
    for (idx, code), c in x.terms.items():
        key = (idx, code & keep)
        s = out.get(key, 0) + c
        if s == 0:
            out.pop(key, None)
        else:
            out[key] = s
    return TensorSeries(x.rank, target, x.prec, out, _clean=True)


def infinitesimal_action(alg: LieAlgebra, f: TensorSeries, g: GroupMap) -> TensorSeries:
    """g^{-1} δ_f(g) = <id⊗id⊗λ, [d3(f2), g12^{-1} d3(g12)]> − d1(f2).

    δ_f is the derivative at ε = 0 of exp(−ε df) * g; the result lies in
    g ⊗ Ŝ(g)_{>0}.
    """
    if f.rank != 0:
        raise ValueError("f must be a scalar series")
    df = differential(f)
    K = left_log_derivative(alg, g)
    df = df.truncate(min(df.prec, K.prec))
    # df in the shared slot 1 against K's derivative slot
    bracket = commutator(alg, df, (1,), K, (0, 1))
    return contract_lambda(bracket, 1) - df


def act_on_solution(alg: LieAlgebra, alpha, g: GroupMap) -> GroupMap:
    """(α * g)(λ) = g(Ad*(α(λ))(λ)) α(λ); α must carry a Hamiltonian certificate."""
    if isinstance(alpha, HamElement):
        if not alpha.certified_ham:
            raise NotHamiltonian("gauge element is not certified Hamiltonian")
        alpha = alpha.g
    else:
        alpha = certify(alg, alpha).g
    return star_product(alg, alpha, g)
