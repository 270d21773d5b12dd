"""Exact Taylor coefficients of the analytic functions of ad that appear in the construction."""
from __future__ import annotations

from functools import lru_cache
from math import comb, factorial

from gmpy2 import mpq

from .errors import MalformedNu


@lru_cache(maxsize=None)
def bernoulli(n: int) -> mpq:
    """B_n with the convention B_1 = −1/2."""
    if n == 0:
        return mpq(1)
    s = sum(comb(n + 1, k) * bernoulli(k) for k in range(n))
    return -s / (n + 1)


def exp_coefficients(order: int, scale=1) -> list[mpq]:
    """e^{scale·z}."""
    scale = mpq(scale)
    return [scale ** m / factorial(m) for m in range(order + 1)]


def phi_coefficients(order: int) -> list[mpq]:
    """φ(z) = −1/z + ½ coth(z/2) = Σ_{n≥1} B_{2n} z^{2n−1} / (2n)!."""
    out = [mpq(0)] * (order + 1)
    for m in range(1, order + 1, 2):
        out[m] = bernoulli(m + 1) / factorial(m + 1)
    return out


def half_coth_coefficients(order: int, scale=1) -> dict[int, mpq]:
    """Laurent coefficients of s·coth(s·z) for s != 0; the key −1 holds the pole 1/z."""
    s = mpq(scale)
    if s == 0:
        raise MalformedNu("s·coth(s·z) has no Laurent expansion at s = 0; use the pole-cancelled form")
    out = {-1: mpq(1)}
    for m in range(1, order + 1, 2):
        out[m] = bernoulli(m + 1) * (2 * s) ** (m + 1) / factorial(m + 1)
    return out


def psi_nu_coefficients(nu, order: int) -> list[mpq]:
    """½ coth(z/2) − ν coth(ν z) with the poles cancelled.

    Coefficient of z^{2n−1} is B_{2n} (1 − (2ν)^{2n}) / (2n)!.  At ν = 0 this
    is the limit φ(z); at ν = ½ it vanishes identically.
    """
    nu = mpq(nu)
    out = [mpq(0)] * (order + 1)
    for m in range(1, order + 1, 2):
        out[m] = bernoulli(m + 1) * (1 - (2 * nu) ** (m + 1)) / factorial(m + 1)
    return out


def z_coth_coefficients(order: int) -> list[mpq]:
    """(z/2) coth(z/2) = Σ B_{2n} z^{2n} / (2n)!."""
    out = [mpq(0)] * (order + 1)
    out[0] = mpq(1)
    for m in range(2, order + 1, 2):
        out[m] = bernoulli(m) / factorial(m)
    return out


def f_coefficients(order: int, scale=1) -> list[mpq]:
    """f(scale·z) for f(z) = z e^z / sinh z = 2z / (1 − e^{−2z}) = Σ B⁺_n (2z)^n / n!."""
    scale = mpq(scale)
    out = []
    for m in range(order + 1):
        b = bernoulli(m)
        if m == 1:
            b = -b
        out.append(b * (2 * scale) ** m / factorial(m))
    return out


def dexp_left_coefficients(order: int) -> list[mpq]:
    """(1 − e^{−z}) / z."""
    return [mpq((-1) ** m, factorial(m + 1)) for m in range(order + 1)]


def dexp_right_coefficients(order: int) -> list[mpq]:
    """(e^z − 1) / z."""
    return [mpq(1, factorial(m + 1)) for m in range(order + 1)]


def inverse_dexp_right_coefficients(order: int) -> list[mpq]:
    """z / (e^z − 1) = Σ B_n z^n / n!."""
    return [bernoulli(m) / factorial(m) for m in range(order + 1)]


def multiply(a, b, order: int) -> list[mpq]:
    """Product of two truncated power series given as coefficient lists."""
    out = [mpq(0)] * (order + 1)
    for i, x in enumerate(a[: order + 1]):
        if x == 0:
            continue
        for j, y in enumerate(b[: order + 1 - i]):
            out[i + j] += x * y
    return out
