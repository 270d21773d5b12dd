"""Exact rational scalars and small dense linear algebra over Q.

All coefficients inside the engine are ``gmpy2.mpq``; the public surface
accepts ints, ``Fraction`` and ``"p/q"`` strings.
"""
from __future__ import annotations

import re
from fractions import Fraction

from gmpy2 import mpq

__all__ = ["Q", "mpq", "parse_rational", "to_fraction", "rref", "solve", "inverse"]

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def Q(value) -> mpq:
    """Coerce ``value`` to an exact rational; floats are refused."""
    if isinstance(value, float):
        raise TypeError("floating point values are not accepted; use 'p/q' strings")
    if isinstance(value, str):
        return parse_rational(value)
    return mpq(value)


def parse_rational(text: str) -> mpq:
    m = _RATIONAL_RE.match(text)
    if m is None:
        raise ValueError(f"not a rational literal: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return mpq(num, den)


def to_fraction(value) -> Fraction:
    value = mpq(value)
    return Fraction(int(value.numerator), int(value.denominator))


def rref(rows: list[list[mpq]], ncols: int):
    """Reduced row echelon form, in place on a copy.

    Returns ``(matrix, pivots)`` where ``pivots[r]`` is the pivot column of
    row ``r``.  Pivots are chosen left to right, so with columns sorted in a
    fixed order the free columns are always the rightmost admissible ones.
    """
    m = [list(row) for row in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def solve(rows: list[list[mpq]], rhs: list[mpq]):
    """Solve ``rows @ x = rhs`` exactly.

    Free variables are set to zero.  Returns ``(x, rank)`` or ``(None, rank)``
    when the system is inconsistent.
    """
    ncols = len(rows[0]) if rows else 0
    aug = [list(row) + [mpq(b)] for row, b in zip(rows, rhs)]
    m, pivots = rref(aug, ncols)
    rank = len(pivots)
    for row in m[rank:]:
        if row[ncols] != 0:
            return None, rank
    x = [mpq(0)] * ncols
    for row, c in zip(m, pivots):
        x[c] = row[ncols]
    return x, rank


def inverse(matrix: list[list[mpq]]):
    """Exact inverse, or ``None`` when singular."""
    n = len(matrix)
    aug = [list(map(mpq, row)) + [mpq(int(i == j)) for j in range(n)] for i, row in enumerate(matrix)]
    m, pivots = rref(aug, n)
    if pivots != list(range(n)):
        return None
    return [row[n:] for row in m]
