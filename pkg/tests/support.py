"""Independent oracles and random generators shared by the test modules.

Nothing here calls the engine's own series arithmetic: oracles work with
sympy expressions and explicit 2x2 / 3x3 matrices.
"""
from __future__ import annotations

import random

import sympy as sp
from gmpy2 import mpq

from poisson_iso.lie_series import GroupMap
from poisson_iso.series import TensorSeries, homogeneous_monomials, space

# sl2 in the defining representation, basis (h, e, f)
SL2_MATRICES = [
    sp.Matrix([[1, 0], [0, -1]]),
    sp.Matrix([[0, 1], [0, 0]]),
    sp.Matrix([[0, 0], [1, 0]]),
]


def sl2_coordinates(m: sp.Matrix) -> list:
    """Coordinates of a traceless 2x2 matrix in (h, e, f)."""
    assert sp.simplify(m[0, 0] + m[1, 1]) == 0
    return [m[0, 0], m[0, 1], m[1, 0]]


def matrix_bracket_constants() -> dict:
    """c^k_{ij} of sl2 recomputed from matrix commutators."""
    out = {}
    for i, a in enumerate(SL2_MATRICES):
        for j, b in enumerate(SL2_MATRICES):
            for k, v in enumerate(sl2_coordinates(a * b - b * a)):
                if v:
                    out[(i, j, k)] = mpq(int(v))
    return out


def brute_bracket(consts: dict, x: dict, y: dict) -> dict:
    out: dict = {}
    for (i, j, k), c in consts.items():
        v = x.get(i, 0) * y.get(j, 0) * c
        if v:
            out[k] = out.get(k, 0) + v
    return {k: v for k, v in out.items() if v}


def brute_tensor_bracket(consts, x: dict, xlegs, y: dict, ylegs, rank: int) -> dict:
    """[x^{xlegs}, y^{ylegs}] for rank-2 tensors placed in a rank-``rank`` product, term by term."""
    out: dict = {}
    for xi, xv in x.items():
        for yi, yv in y.items():
            slots_x = dict(zip(xlegs, xi))
            slots_y = dict(zip(ylegs, yi))
            shared = set(xlegs) & set(ylegs)
            assert len(shared) == 1
            s = shared.pop()
            for k, c in brute_bracket(consts, {slots_x[s]: 1}, {slots_y[s]: 1}).items():
                idx = []
                for pos in range(rank):
                    if pos == s:
                        idx.append(k)
                    elif pos in slots_x:
                        idx.append(slots_x[pos])
                    else:
                        idx.append(slots_y[pos])
                key = tuple(idx)
                out[key] = out.get(key, 0) + xv * yv * c
    return {k: v for k, v in out.items() if v}


def brute_cyb(consts, r: dict) -> dict:
    out: dict = {}
    for legs_x, legs_y in (((0, 1), (0, 2)), ((0, 1), (1, 2)), ((0, 2), (1, 2))):
        for k, v in brute_tensor_bracket(consts, r, legs_x, r, legs_y, 3).items():
            out[k] = out.get(k, 0) + v
    return {k: v for k, v in out.items() if v}


# ---------------------------------------------------------------------------
# series <-> sympy
# ---------------------------------------------------------------------------

def lam_symbols(n: int):
    return sp.symbols(f"l0:{n}")


def to_sympy(x: TensorSeries, syms=None) -> dict:
    """{index tuple: polynomial} for a parameter-free series."""
    syms = syms or lam_symbols(x.nvars)
    out: dict = {}
    for (idx, code), c in x.terms.items():
        exps = x.space.decode(code)
        mono = sp.Integer(1)
        for s, e in zip(syms, exps):
            mono *= s ** e
        out[idx] = out.get(idx, 0) + sp.Rational(int(c.numerator), int(c.denominator)) * mono
    return out


def truncate_poly(expr, syms, degree: int):
    """Drop monomials of total degree > degree."""
    poly = sp.Poly(sp.expand(expr), *syms)
    keep = [(m, c) for m, c in poly.terms() if sum(m) <= degree]
    return sp.Add(*[c * sp.Mul(*[s ** e for s, e in zip(syms, m)]) for m, c in keep])


def taylor(expr, z, order: int) -> list:
    """Taylor coefficients [a_0 .. a_order] of expr at z = 0, via sympy."""
    ser = sp.series(expr, z, 0, order + 1).removeO()
    return [sp.Rational(ser.coeff(z, k)) for k in range(order + 1)]


# ---------------------------------------------------------------------------
# matrix exp/log oracle over a truncated polynomial ring
# ---------------------------------------------------------------------------
# Matrices are lists of rows of sympy PolyElements; sympy's sparse ring keeps
# this fast enough for 3x3 matrices through degree 4.

def poly_ring(n: int):
    R, *gens = sp.ring(",".join(f"l{i}" for i in range(n)), sp.QQ)
    return R, gens


def sl2_adjoint_matrices():
    """ad(h), ad(e), ad(f) as 3x3 integer matrices in the basis (h, e, f)."""
    consts = matrix_bracket_constants()
    mats = []
    for i in range(3):
        m = [[0] * 3 for _ in range(3)]
        for (a, j, k), c in consts.items():
            if a == i:
                m[k][j] += int(c)
        mats.append(m)
    return mats


def ring_trunc(p, degree: int):
    R = p.ring
    return R({m: c for m, c in p.terms() if sum(m) <= degree})


def series_to_ring(x: TensorSeries, R) -> dict:
    """{index tuple: ring element} for a parameter-free series."""
    out: dict = {}
    for (idx, code), c in x.terms.items():
        m = tuple(x.space.decode(code))
        term = R({m: sp.QQ(int(c.numerator), int(c.denominator))})
        out[idx] = out.get(idx, R.zero) + term
    return out


def ring_matrix(components: dict, mats, R):
    k = len(mats[0])
    out = [[R.zero] * k for _ in range(k)]
    for idx, p in components.items():
        m = mats[idx[0]]
        for a in range(k):
            for b in range(k):
                if m[a][b]:
                    out[a][b] += p * m[a][b]
    return out


def mat_mul(x, y, degree):
    k = len(x)
    R = x[0][0].ring
    return [[ring_trunc(sum((x[a][c] * y[c][b] for c in range(k)), R.zero), degree)
             for b in range(k)] for a in range(k)]


def _eye(R, k):
    return [[R.one if a == b else R.zero for b in range(k)] for a in range(k)]


def matrix_exp(m, degree: int):
    R, k = m[0][0].ring, len(m)
    out = _eye(R, k)
    term = _eye(R, k)
    for j in range(1, degree + 1):
        term = [[v / j for v in row] for row in mat_mul(term, m, degree)]
        out = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(out, term)]
    return out


def matrix_log(m, degree: int):
    R, k = m[0][0].ring, len(m)
    eye = _eye(R, k)
    x = [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(m, eye)]
    out = [[R.zero] * k for _ in range(k)]
    power = eye
    for j in range(1, degree + 1):
        power = mat_mul(power, x, degree)
        sgn = sp.QQ((-1) ** (j + 1), j)
        out = [[a + b * sgn for a, b in zip(r1, r2)] for r1, r2 in zip(out, power)]
    return out


def sl2_from_adjoint(m, mats) -> dict:
    """Read c with m = Σ c_i ad(e_i) ([x, e] = 2a e − c h, [x, f] = b h − 2a f) and check it."""
    a, b, c = m[1][1] / 2, m[0][2], -m[0][1]
    comps = {(0,): a, (1,): b, (2,): c}
    assert ring_matrix(comps, mats, m[0][0].ring) == m, "not in the image of ad"
    return {k: v for k, v in comps.items() if v}


# ---------------------------------------------------------------------------
# random inputs (small-integer rationals, seeded)
# ---------------------------------------------------------------------------

def rand_q(rng: random.Random, lo=-3, hi=3) -> mpq:
    return mpq(rng.randint(lo, hi), rng.choice((1, 2, 3)))


def rand_scalar(rng, n: int, degrees, prec: int) -> TensorSeries:
    s = space(n)
    terms = {}
    for d in degrees:
        for e in homogeneous_monomials(n, d):
            c = rand_q(rng)
            if c:
                terms[((), s.encode(e))] = c
    return TensorSeries(0, s, prec, terms)


def rand_vector(rng, n: int, degrees, prec: int) -> TensorSeries:
    s = space(n)
    terms = {}
    for d in degrees:
        for e in homogeneous_monomials(n, d):
            for i in range(n):
                c = rand_q(rng)
                if c:
                    terms[((i,), s.encode(e))] = c
    return TensorSeries(1, s, prec, terms)


def rand_group(rng, n: int, prec: int) -> GroupMap:
    return GroupMap(rand_vector(rng, n, range(1, prec + 1), prec))


def rand_cubic(rng, n: int, prec: int) -> TensorSeries:
    return rand_scalar(rng, n, (3,), prec)
