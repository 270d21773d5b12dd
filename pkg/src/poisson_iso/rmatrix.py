"""Dynamical r-matrices as tensor series and their Yang-Baxter residuals."""
from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

from . import coefficients as co
from .lie_core import QuasitriangularData
from .lie_series import apply_analytic, commutator, total_action
from .series import (
    TensorSeries,
    alternate,
    constant,
    contract_lambda,
    differential,
    legs,
    space,
)

__all__ = [
    "DynamicalRMatrix",
    "phi_coefficients",
    "lambda_vee",
    "constant_series",
    "rho_am",
    "rho_am_nu",
    "z_nu",
    "cyb_series",
    "cdybe_residual",
    "cdybe_constant",
    "rho_fm_of_x",
    "equivariance_defect",
]

phi_coefficients = co.phi_coefficients


@dataclass(frozen=True, eq=False)
class DynamicalRMatrix:
    """An antisymmetric rank-2 series with a provenance tag (AM, AM_nu, FM, twisted)."""

    value: TensorSeries
    provenance: str

    def __post_init__(self):
        if self.value.rank != 2:
            raise ValueError("a dynamical r-matrix has two tensor slots")
        sym = self.value + legs(self.value, 2, 1)
        if not sym.is_zero():
            raise ValueError(f"{self.provenance} r-matrix is not antisymmetric: "
                             f"{sym.lowest_term()}")

    @property
    def prec(self) -> int:
        return self.value.prec


def constant_series(tensor: dict, nvars: int, prec: int, caps=()) -> TensorSeries:
    if not tensor:
        rank = 0
        return TensorSeries(rank, space(nvars, tuple(caps)), prec)
    return constant(tensor, nvars, prec, caps)


def lambda_vee(qt: QuasitriangularData, prec: int, caps=()) -> TensorSeries:
    """λ^∨ = (λ ⊗ id)(t) as a rank-1 series, homogeneous of degree 1."""
    n = qt.alg.dim
    if not qt.t:
        return TensorSeries(1, space(n, tuple(caps)), prec)
    return contract_lambda(constant(qt.t, n, prec - 1, caps), 0)


def _t_series(qt, prec, caps=()):
    n = qt.alg.dim
    if not qt.t:
        return TensorSeries(2, space(n, tuple(caps)), prec)
    return constant(qt.t, n, prec, caps)


def rho_am(qt: QuasitriangularData, prec: int) -> DynamicalRMatrix:
    """(id ⊗ φ(ad λ^∨))(t) through degree ``prec``."""
    x = lambda_vee(qt, prec)
    value = apply_analytic(qt.alg, co.phi_coefficients(prec), x, _t_series(qt, prec), slot=1)
    return DynamicalRMatrix(value, "AM")


def rho_am_nu(qt: QuasitriangularData, nu, prec: int) -> DynamicalRMatrix:
    """2ν ρ_AM(2ν λ): the degree-d part is scaled by (2ν)^{d+1}."""
    s = 2 * mpq(nu)
    base = rho_am(qt, prec).value
    deg = base.space.degree
    terms = {k: v * s ** (deg(k[1]) + 1) for k, v in base.terms.items()}
    return DynamicalRMatrix(TensorSeries(2, base.space, prec, terms), "AM_nu")


def z_nu(qt: QuasitriangularData, nu) -> dict:
    """(ν² − 1/4)[t^{12}, t^{23}]."""
    c = mpq(nu) ** 2 - mpq(1, 4)
    return {k: v * c for k, v in qt.t_bracket_23().items() if v * c != 0}


def cyb_series(alg, rho: TensorSeries) -> TensorSeries:
    """[ρ^{12}, ρ^{13}] + [ρ^{12}, ρ^{23}] + [ρ^{13}, ρ^{23}], polynomial parts multiplied."""
    acc = None
    for xl, yl in (((0, 1), (0, 2)), ((0, 1), (1, 2)), ((0, 2), (1, 2))):
        term = commutator(alg, rho, xl, rho, yl)
        acc = term if acc is None else acc + term
    return acc


def cdybe_residual(alg, rho: TensorSeries, Z: dict) -> TensorSeries:
    """CYB(ρ) − Alt(dρ) − Z; valid through degree prec − 1."""
    value = rho.value if isinstance(rho, DynamicalRMatrix) else rho
    left = cyb_series(alg, value) - alternate(differential(value))
    if Z:
        left = left - constant(Z, value.nvars, left.prec, value.space.caps)
    return left


def cdybe_constant(qt: QuasitriangularData) -> mpq:
    """The c with CYB(ρ_AM) − Alt(dρ_AM) = c [t^{12}, t^{23}], read from degree 0.

    Only the degree-1 part of ρ_AM contributes at degree 0, so the constant
    is −Alt(d ρ_1) divided by [t^{12}, t^{23}] component-wise.  Raises when
    the two tensors are not proportional (or t is degenerate in a way that
    makes [t^{12}, t^{23}] vanish).
    """
    rho1 = rho_am(qt, 1).value
    lhs = -alternate(differential(rho1))
    lhs0 = {idx: c for (idx, code), c in lhs.terms.items() if code == 0}
    base = qt.t_bracket_23()
    if not base:
        if lhs0:
            raise ValueError("degree-0 CDYBE defect is nonzero but [t12, t23] vanishes")
        return mpq(0)
    ratio = None
    for idx in set(base) | set(lhs0):
        b = base.get(idx, 0)
        v = lhs0.get(idx, 0)
        if b == 0:
            if v != 0:
                raise ValueError(f"degree-0 defect not proportional to [t12, t23] at {idx}")
            continue
        q = mpq(v) / b
        if ratio is None:
            ratio = q
        elif q != ratio:
            raise ValueError(f"degree-0 defect not proportional to [t12, t23] at {idx}")
    return ratio


def rho_fm_of_x(qt: QuasitriangularData, xbar: TensorSeries, nu) -> DynamicalRMatrix:
    """(id ⊗ ψ_ν(ad x̄))(t) with ψ_ν(z) = ½ coth(z/2) − ν coth(ν z), poles cancelled.

    ν = 0 is the limit ψ_0 = φ.
    """
    prec = xbar.prec
    coeffs = co.psi_nu_coefficients(nu, prec + sum(xbar.space.caps))
    t = _t_series(qt, prec, xbar.space.caps)
    value = apply_analytic(qt.alg, coeffs, xbar, t, slot=1)
    return DynamicalRMatrix(value, "FM")


def equivariance_defect(alg, x: TensorSeries) -> list[TensorSeries]:
    """[a·x for each basis a]: ad on every slot plus the coadjoint action on λ."""
    return [total_action(alg, a, x) for a in range(alg.dim)]
