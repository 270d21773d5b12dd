"""Successive-approximation construction of g(λ) with (r0)^g = ρ_AM.

(r0)^g := g1^{-1}d2 g1 − g2^{-1}d1 g2 + Ad(g⊗g)^{-1}(r0) + <id⊗id⊗λ, [K^{23}, K^{13}]>

Starting from g0 = exp(−r/2), each step removes the lowest-degree part α of
(r0)^{g_n} − ρ_AM by solving Alt(dβ) = α and replacing g_n by exp(−β) * g_n.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

from gmpy2 import mpq

from . import coefficients as co
from .errors import DegreeOverflow, Inconsistent, NotInvariant
from .gauge import commutator_term, star_product
from .lie_core import QuasitriangularData
from .lie_series import GroupMap, apply_analytic, left_log_derivative, total_action
from .rational import rref
from .rmatrix import cdybe_constant, cdybe_residual, rho_am
from .series import (
    TensorSeries,
    alternate,
    constant,
    contract_lambda,
    differential,
    homogeneous_monomials,
    legs,
    outer,
    space,
)

log = logging.getLogger(__name__)

DEFAULT_MAX_DEGREE = 6

__all__ = [
    "SolverState",
    "SolveResult",
    "initial_map",
    "twisted_r0",
    "corrector_solve",
    "corrector_rank",
    "solve_g",
    "lemma1_residual",
    "DEFAULT_MAX_DEGREE",
]


@dataclass
class SolverState:
    n: int
    g: GroupMap
    rho: TensorSeries
    residual: TensorSeries


@dataclass
class SolveResult:
    g: GroupMap
    residual: TensorSeries
    degree: int
    trace: list = field(default_factory=list)
    states: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.residual.is_zero(self.degree)


def initial_map(qt: QuasitriangularData, prec: int, caps=()) -> GroupMap:
    """g0(λ) = exp(−(id ⊗ λ)(r)/2)."""
    n = qt.alg.dim
    if not qt.r:
        return GroupMap(TensorSeries(1, space(n, caps), prec))
    A = contract_lambda(constant(qt.r, n, prec - 1, caps), 1) * mpq(-1, 2)
    return GroupMap(A)


def twisted_r0(qt: QuasitriangularData, g: GroupMap) -> TensorSeries:
    """(r0)^g, valid through degree prec − 1 of log g."""
    alg = qt.alg
    K = left_log_derivative(alg, g)
    out = K - legs(K, 2, 1) + commutator_term(alg, K)
    if qt.r0:
        r0 = constant(qt.r0, alg.dim, g.prec, g.A.space.caps)
        order = g.prec + sum(g.A.space.caps) + 1
        expo = co.exp_coefficients(order, -1)
        moved = apply_analytic(alg, expo, g.A, r0, slot=0)
        moved = apply_analytic(alg, expo, g.A, moved, slot=1)
        out = out + moved
    return out


def _columns(n: int, degree: int):
    return [(i, e) for e in homogeneous_monomials(n, degree) for i in range(n)]


def _forward_matrix(n: int, degree: int):
    """Matrix of β ↦ Alt(dβ) from g ⊗ S^{degree} to g^{⊗2} ⊗ S^{degree−1}."""
    sp = space(n)
    cols = _columns(n, degree)
    rows: dict = {}
    matrix_cols = []
    for i, e in cols:
        beta = TensorSeries(1, sp, degree, {((i,), sp.encode(e)): 1})
        image = alternate(differential(beta))
        col = {}
        for key, c in image.terms.items():
            if key not in rows:
                rows[key] = len(rows)
            col[rows[key]] = c
        matrix_cols.append(col)
    return cols, rows, matrix_cols


def corrector_rank(n: int, degree: int) -> tuple[int, int]:
    """(rank, nullity) of β ↦ Alt(dβ) on g ⊗ S^{degree}."""
    cols, rows, mcols = _forward_matrix(n, degree)
    m = [[mcols[j].get(r, 0) for j in range(len(cols))] for r in range(len(rows))]
    _, piv = rref(m, len(cols))
    return len(piv), len(cols) - len(piv)


def corrector_solve(alpha: TensorSeries, degree: int | None = None) -> TensorSeries:
    """β ∈ g ⊗ S^{d+1} with Alt(dβ) = α for α antisymmetric of pure degree d.

    Among all solutions the one supported on pivot columns (free variables
    zero, columns in graded-lex order) is returned.  Raises ``Inconsistent``
    when α is not in the image, e.g. when Alt(dα) != 0.
    """
    n = alpha.nvars
    sp = alpha.space
    degs = alpha.degrees()
    if degree is None:
        if len(degs) > 1:
            raise ValueError(f"α must be homogeneous, has degrees {degs}")
        degree = degs[0] if degs else 0
    elif degs and degs != [degree]:
        raise ValueError(f"α must be homogeneous of degree {degree}, has {degs}")
    if not alpha.terms:
        return TensorSeries(1, sp, degree + 1)
    if sp.caps:
        raise ValueError("corrector_solve works on parameter-free series")
    cols, rows, mcols = _forward_matrix(n, degree + 1)
    for key in alpha.terms:
        if key not in rows:
            raise Inconsistent(f"α has a component {key} outside the image of Alt∘d")
    nr, nc = len(rows), len(cols)
    aug = [[mcols[j].get(r, 0) for j in range(nc)] + [0] for r in range(nr)]
    for key, c in alpha.terms.items():
        aug[rows[key]][nc] = c
    m, piv = rref(aug, nc + 1)
    if nc in piv:
        raise Inconsistent("α is not of the form Alt(dβ): the corrector system has no solution")
    out = {}
    for r, p in enumerate(piv):
        v = m[r][nc]
        if v != 0:
            i, e = cols[p]
            out[((i,), sp.encode(e))] = v
    return TensorSeries(1, sp, degree + 1, out)


def solve_g(qt: QuasitriangularData, N: int, max_degree: int = DEFAULT_MAX_DEGREE,
            keep_states: bool = False) -> SolveResult:
    """g with (r0)^g − ρ_AM = 0 through degree N.

    log g is carried through degree N + 1, since (r0)^g loses one degree to
    the differential.  The returned trace has one record per degree:
    {degree, residual_terms, rank, nullity}.
    """
    if N < 1:
        raise DegreeOverflow("degree must be at least 1")
    if N > max_degree:
        raise DegreeOverflow(f"degree {N} exceeds the configured bound {max_degree}")
    alg = qt.alg
    P = N + 1
    target = rho_am(qt, N).value
    g = initial_map(qt, P)
    trace = []
    states = []
    for n in range(0, N + 1):
        rho = twisted_r0(qt, g)
        diff = rho - target
        if keep_states:
            states.append(SolverState(n, g, rho, diff))
        bad = [d for d in range(n) if not diff.homogeneous(d).is_zero()]
        if bad:
            raise Inconsistent(f"loop invariant broken: residual at degree {bad[0]} after step {n}")
        alpha = diff.homogeneous(n)
        rank, nullity = corrector_rank(alg.dim, n + 1)
        record = {"degree": n, "residual_terms": len(alpha.terms), "rank": rank, "nullity": nullity}
        trace.append(record)
        log.debug("solver step %s", record)
        if alpha.terms:
            beta = corrector_solve(alpha, n).with_prec(P)
            g = star_product(alg, GroupMap(-beta), g)
    residual = twisted_r0(qt, g) - target
    return SolveResult(g, residual.truncate(N), N, trace, states)


def lemma1_residual(qt: QuasitriangularData, rho: TensorSeries, rho_inv: TensorSeries,
                    Z: dict | None = None) -> tuple[TensorSeries, int]:
    """CYB(ρ) − Alt(dρ) − Z + ½ Alt(Σ_ab r^{ab} e_a ⊗ (e_b · α)), α = ρ − ρ_inv.

    e_b · α is the diagonal action of e_b on α (ad on both slots plus the
    coadjoint action on λ), the classical form of [r^{1,234}, α^{2,3,4}].
    The left side lies in ∧³(g), and the bracket term is compared after the
    same cyclic alternation.  Returns the residual together with the degree
    n = val(α) through which it vanishes.  ``ρ_inv`` must be g-invariant.
    """
    alg = qt.alg
    for a in range(alg.dim):
        if not total_action(alg, a, rho_inv).is_zero():
            raise NotInvariant(f"ρ_inv is not invariant under e_{a}")
    if Z is None:
        c = cdybe_constant(qt)
        Z = {k: v * c for k, v in qt.t_bracket_23().items()}
    alpha = rho - rho_inv
    n = alpha.valuation()
    res = cdybe_residual(alg, rho, Z)
    moved = [total_action(alg, b, alpha) for b in range(alg.dim)]
    acc = None
    for (a, b), v in qt.r.items():
        ea = TensorSeries(1, alpha.space, moved[b].prec, {((a,), 0): v / 2})
        term = outer(ea, moved[b])
        acc = term if acc is None else acc + term
    if acc is not None:
        res = res + alternate(acc)
    return res, min(n, res.prec)
