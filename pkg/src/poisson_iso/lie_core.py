"""Finite-dimensional Lie algebras with a quasitriangular r-matrix, over Q.

Constant tensors here are plain ``{index_tuple: mpq}`` dicts, deliberately
independent of the series engine so the two can check each other.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from pathlib import Path

from .errors import (
    AlgebraInputError,
    AntisymmetryViolation,
    JacobiViolation,
    QuasitriangularViolation,
)
from .rational import Q, inverse, mpq, to_fraction

Tensor = dict  # {tuple[int, ...]: mpq}


def _clean(t: Tensor) -> Tensor:
    return {k: v for k, v in t.items() if v != 0}


def _add_into(acc: Tensor, key, value):
    s = acc.get(key, 0) + value
    if s == 0:
        acc.pop(key, None)
    else:
        acc[key] = s


@dataclass(frozen=True)
class LieAlgebraData:
    """Raw structure constants: ``structure_constants[(i, j, k)]`` is c^k_{ij}, [e_i,e_j] = Σ_k c^k_{ij} e_k.

    Either or both orders (i, j) and (j, i) may be present; ``validate_algebra``
    checks that they agree.
    """

    dim: int
    basis_labels: tuple[str, ...]
    structure_constants: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    checked: tuple[str, ...]


def validate_algebra(data: LieAlgebraData) -> ValidationReport:
    """Check index ranges, antisymmetry and Jacobi exactly.

    Raises the first violation found (``AntisymmetryViolation`` or
    ``JacobiViolation``, each carrying the offending indices).
    """
    n = data.dim
    if n < 1:
        raise AlgebraInputError("dim must be >= 1")
    if len(data.basis_labels) != n:
        raise AlgebraInputError(f"{len(data.basis_labels)} basis labels for dim {n}")
    for key in data.structure_constants:
        if len(key) != 3 or not all(0 <= i < n for i in key):
            raise AlgebraInputError(f"structure constant index {key} out of range for dim {n}")
    table = _bracket_table(data)
    for i, j, k in product(range(n), repeat=3):
        left = table.get((i, j), {})
        jac: Tensor = {}
        for a, ca in left.items():
            for b, cb in table.get((a, k), {}).items():
                _add_into(jac, b, ca * cb)
        for a, ca in table.get((j, k), {}).items():
            for b, cb in table.get((a, i), {}).items():
                _add_into(jac, b, ca * cb)
        for a, ca in table.get((k, i), {}).items():
            for b, cb in table.get((a, j), {}).items():
                _add_into(jac, b, ca * cb)
        if jac:
            comp, val = min(jac.items())
            raise JacobiViolation(i, j, k, comp, val)
    return ValidationReport(True, ("indices", "antisymmetry", "jacobi"))


def _bracket_table(data: LieAlgebraData) -> dict:
    """Full table {(i, j): {k: c}} after the antisymmetry check."""
    raw = {key: Q(v) for key, v in data.structure_constants.items()}
    table: dict = {}
    for (i, j, k), c in raw.items():
        if i == j:
            if c != 0:
                raise AntisymmetryViolation(i, j, k, c, c)
            continue
        other = raw.get((j, i, k))
        if other is not None and other != -c:
            raise AntisymmetryViolation(i, j, k, c, other)
        if c != 0:
            table.setdefault((i, j), {})[k] = c
            table.setdefault((j, i), {})[k] = -c
    return table


class LieAlgebra:
    """Validated Lie algebra.

    Stores brackets canonically for i < j; ``table[i][j]`` is the derived
    dense lookup of (k, c^k_{ij}) pairs used by the hot loops.
    """

    def __init__(self, data: LieAlgebraData):
        validate_algebra(data)
        self.data = data
        self.dim = data.dim
        self.labels = tuple(data.basis_labels)
        full = _bracket_table(data)
        self.brackets = {key: dict(sorted(v.items())) for key, v in sorted(full.items()) if key[0] < key[1]}
        self.table = [[tuple(sorted(full.get((i, j), {}).items())) for j in range(self.dim)]
                      for i in range(self.dim)]

    def __repr__(self):
        return f"LieAlgebra(dim={self.dim}, basis={list(self.labels)})"

    @property
    def is_abelian(self) -> bool:
        return not self.brackets

    def bracket(self, x: dict, y: dict) -> dict:
        """Bracket of vectors given as {i: coefficient}."""
        out: dict = {}
        for i, a in x.items():
            for j, b in y.items():
                for k, c in self.table[i][j]:
                    _add_into(out, k, a * b * c)
        return out

    def ad_matrix(self, x: dict) -> list[list[mpq]]:
        """Matrix of ad x: column j is [x, e_j]."""
        n = self.dim
        m = [[mpq(0)] * n for _ in range(n)]
        for j in range(n):
            for k, c in self.bracket(x, {j: mpq(1)}).items():
                m[k][j] = c
        return m

    def bracket_in_slot(self, x: dict, t: Tensor, slot: int) -> Tensor:
        """Apply ad x to one slot of a constant tensor."""
        out: Tensor = {}
        for idx, v in t.items():
            for i, a in x.items():
                for k, c in self.table[i][idx[slot]]:
                    _add_into(out, idx[:slot] + (k,) + idx[slot + 1:], a * v * c)
        return out

    def commutator_legs(self, x: Tensor, xlegs, y: Tensor, ylegs, rank: int) -> Tensor:
        """[x^{xlegs}, y^{ylegs}] in g^{⊗rank}; legs are 0-based and must share exactly one slot."""
        common = set(xlegs) & set(ylegs)
        if len(common) != 1 or set(xlegs) | set(ylegs) != set(range(rank)):
            raise ValueError("legs must share one slot and cover all slots")
        (c,) = common
        px, py = list(xlegs).index(c), list(ylegs).index(c)
        out: Tensor = {}
        for ix, vx in x.items():
            for iy, vy in y.items():
                slots = [None] * rank
                for m, p in enumerate(xlegs):
                    slots[p] = ix[m]
                for m, p in enumerate(ylegs):
                    slots[p] = iy[m]
                for k, s in self.table[ix[px]][iy[py]]:
                    slots[c] = k
                    _add_into(out, tuple(slots), vx * vy * s)
        return out


def cyb(alg: LieAlgebra, r: Tensor) -> Tensor:
    """CYB(r) = [r^{12}, r^{13}] + [r^{12}, r^{23}] + [r^{13}, r^{23}] in g^{⊗3}."""
    out: Tensor = {}
    for xl, yl in (((0, 1), (0, 2)), ((0, 1), (1, 2)), ((0, 2), (1, 2))):
        for k, v in alg.commutator_legs(r, xl, r, yl, 3).items():
            _add_into(out, k, v)
    return out


def flip(t: Tensor) -> Tensor:
    """t^{2,1}."""
    return {(b, a): v for (a, b), v in t.items()}


def is_invariant(alg: LieAlgebra, t: Tensor) -> bool:
    """[x ⊗ 1 + 1 ⊗ x, t] = 0 for every basis x."""
    for i in range(alg.dim):
        acc: Tensor = {}
        for slot in range(len(next(iter(t))) if t else 0):
            for k, v in alg.bracket_in_slot({i: mpq(1)}, t, slot).items():
                _add_into(acc, k, v)
        if acc:
            return False
    return True


class QuasitriangularData:
    """(g, r) with derived r0, t, t^{-1}, and the maps L, R : g* → g.

    Construction validates CYB(r) = 0, invariance of t, L − R = t-contraction
    and that L, R are Lie morphisms from (g*, dual bracket).
    """

    def __init__(self, alg: LieAlgebra, r: dict, name: str = "custom"):
        self.alg = alg
        self.name = name
        n = alg.dim
        self.r: Tensor = _clean({tuple(k): Q(v) for k, v in r.items()})
        for idx in self.r:
            if len(idx) != 2 or not all(0 <= i < n for i in idx):
                raise AlgebraInputError(f"r index {idx} out of range for dim {n}")
        r21 = flip(self.r)
        self.r21 = r21
        keys = set(self.r) | set(r21)
        self.r0: Tensor = _clean({k: (self.r.get(k, 0) - r21.get(k, 0)) / 2 for k in keys})
        self.t: Tensor = _clean({k: self.r.get(k, 0) + r21.get(k, 0) for k in keys})
        self.t_matrix = [[self.t.get((a, b), mpq(0)) for b in range(n)] for a in range(n)]
        inv = inverse(self.t_matrix)
        self.t_inverse = inv
        self.validate()

    @property
    def factorizable(self) -> bool:
        return self.t_inverse is not None

    def validate(self):
        alg = self.alg
        defect = cyb(alg, self.r)
        if defect:
            idx, v = min(defect.items())
            raise QuasitriangularViolation(f"CYB(r) != 0: component {idx} = {v}")
        if not is_invariant(alg, self.t):
            raise QuasitriangularViolation("t = r + r^{2,1} is not g-invariant")
        n = alg.dim
        for a in range(n):
            lam = {a: mpq(1)}
            diff = _clean({b: self.L_map(lam).get(b, 0) - self.R_map(lam).get(b, 0) for b in range(n)})
            if diff != _clean(self.t_contract(lam)):
                raise QuasitriangularViolation("L - R differs from contraction with t")
        for a in range(n):
            for b in range(n):
                xi, eta = {a: mpq(1)}, {b: mpq(1)}
                db = self.dual_bracket(xi, eta)
                for m in (self.L_map, self.R_map):
                    if _clean(m(db)) != alg.bracket(m(xi), m(eta)):
                        raise QuasitriangularViolation(f"{m.__name__} is not a Lie morphism on ({a}, {b})")

    # -- linear maps g* -> g ------------------------------------------
    def L_map(self, lam: dict) -> dict:
        """L(λ) = (λ ⊗ id)(r)."""
        out: dict = {}
        for (a, b), v in self.r.items():
            if a in lam:
                _add_into(out, b, lam[a] * v)
        return out

    def R_map(self, lam: dict) -> dict:
        """R(λ) = −(λ ⊗ id)(r^{2,1})."""
        out: dict = {}
        for (a, b), v in self.r.items():
            if b in lam:
                _add_into(out, a, -lam[b] * v)
        return out

    def t_contract(self, lam: dict) -> dict:
        """λ^∨ = (λ ⊗ id)(t)."""
        out: dict = {}
        for (a, b), v in self.t.items():
            if a in lam:
                _add_into(out, b, lam[a] * v)
        return out

    # -- bialgebra structure -----------------------------------------
    def cobracket(self, x: dict) -> Tensor:
        """δ(x) = [x ⊗ 1 + 1 ⊗ x, r]."""
        out: Tensor = {}
        for slot in (0, 1):
            for k, v in self.alg.bracket_in_slot(x, self.r, slot).items():
                _add_into(out, k, v)
        return out

    def dual_bracket(self, xi: dict, eta: dict) -> dict:
        """[ξ, η]_{g*} defined by <[ξ, η], x> = <ξ ⊗ η, δ(x)>."""
        out: dict = {}
        for c in range(self.alg.dim):
            for (a, b), v in self.cobracket({c: mpq(1)}).items():
                if a in xi and b in eta:
                    _add_into(out, c, xi[a] * eta[b] * v)
        return out

    def t_bracket_23(self) -> Tensor:
        """[t^{1,2}, t^{2,3}] in ∧³g."""
        return self.alg.commutator_legs(self.t, (0, 1), self.t, (1, 2), 3)


# ---------------------------------------------------------------------------
# builtins and file input
# ---------------------------------------------------------------------------

def sl2() -> QuasitriangularData:
    """sl2 in basis (h, e, f), [h,e]=2e, [h,f]=−2f, [e,f]=h, with r = e⊗f + ¼ h⊗h."""
    data = LieAlgebraData(3, ("h", "e", "f"), {
        (0, 1, 1): Fraction(2),
        (0, 2, 2): Fraction(-2),
        (1, 2, 0): Fraction(1),
    })
    r = {(1, 2): Fraction(1), (0, 0): Fraction(1, 4)}
    return QuasitriangularData(LieAlgebra(data), r, name="sl2")


def gl2() -> QuasitriangularData:
    """gl2 = sl2 ⊕ k·z with r = e⊗f + ¼ h⊗h + ½ z⊗z (factorizable, non-semisimple)."""
    data = LieAlgebraData(4, ("h", "e", "f", "z"), {
        (0, 1, 1): Fraction(2),
        (0, 2, 2): Fraction(-2),
        (1, 2, 0): Fraction(1),
    })
    r = {(1, 2): Fraction(1), (0, 0): Fraction(1, 4), (3, 3): Fraction(1, 2)}
    return QuasitriangularData(LieAlgebra(data), r, name="gl2")


def abelian(dim: int = 2) -> QuasitriangularData:
    """Abelian algebra with r = 0 (not factorizable)."""
    data = LieAlgebraData(dim, tuple(f"x{i}" for i in range(dim)), {})
    return QuasitriangularData(LieAlgebra(data), {}, name=f"abelian{dim}")


BUILTINS = {"sl2": sl2, "gl2": gl2, "abelian2": lambda: abelian(2), "abelian1": lambda: abelian(1)}

_FIELDS = {"dim", "basis", "brackets", "r"}


def load_algebra(source) -> QuasitriangularData:
    """Builtin name, path to an algebra-spec JSON file, or an already-parsed dict."""
    if isinstance(source, QuasitriangularData):
        return source
    if isinstance(source, str) and source in BUILTINS:
        return BUILTINS[source]()
    if isinstance(source, dict):
        return parse_algebra_spec(source, origin="<dict>")
    path = Path(source)
    if not path.exists():
        raise AlgebraInputError(f"unknown algebra {source!r}: not a builtin ({', '.join(BUILTINS)}) nor a file")
    text = path.read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise AlgebraInputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_algebra_spec(doc, origin=str(path))


def _rational_field(value, where: str) -> Fraction:
    if not isinstance(value, (str, int)) or isinstance(value, bool):
        raise AlgebraInputError(f"{where}: expected a 'p/q' string, got {value!r}")
    try:
        return to_fraction(Q(str(value)))
    except ValueError as exc:
        raise AlgebraInputError(f"{where}: {exc}") from None


def _index_field(value, dim: int, where: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or not 0 <= value < dim:
        raise AlgebraInputError(f"{where}: index {value!r} not in [0, {dim})")
    return value


def parse_algebra_spec(doc, origin: str = "<input>") -> QuasitriangularData:
    if not isinstance(doc, dict):
        raise AlgebraInputError(f"{origin}: top level must be an object")
    unknown = sorted(set(doc) - _FIELDS)
    if unknown:
        raise AlgebraInputError(f"{origin}: unknown field(s) {unknown}")
    missing = sorted(_FIELDS - set(doc))
    if missing:
        raise AlgebraInputError(f"{origin}: missing field(s) {missing}")
    dim = doc["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise AlgebraInputError(f"{origin}: field 'dim' must be a positive integer")
    basis = doc["basis"]
    if not isinstance(basis, list) or len(basis) != dim or not all(isinstance(b, str) for b in basis):
        raise AlgebraInputError(f"{origin}: field 'basis' must list {dim} strings")
    consts: dict = {}
    for n, entry in enumerate(doc["brackets"]):
        where = f"{origin}: brackets[{n}]"
        if not isinstance(entry, list) or len(entry) != 4:
            raise AlgebraInputError(f"{where}: expected [i, j, k, \"p/q\"]")
        i, j, k = (_index_field(v, dim, where) for v in entry[:3])
        if (i, j, k) in consts:
            raise AlgebraInputError(f"{where}: duplicate entry for ({i}, {j}, {k})")
        consts[(i, j, k)] = _rational_field(entry[3], where)
    r: dict = {}
    for n, entry in enumerate(doc["r"]):
        where = f"{origin}: r[{n}]"
        if not isinstance(entry, list) or len(entry) != 3:
            raise AlgebraInputError(f"{where}: expected [i, j, \"p/q\"]")
        i, j = (_index_field(v, dim, where) for v in entry[:2])
        if (i, j) in r:
            raise AlgebraInputError(f"{where}: duplicate entry for ({i}, {j})")
        r[(i, j)] = _rational_field(entry[2], where)
    data = LieAlgebraData(dim, tuple(basis), consts)
    return QuasitriangularData(LieAlgebra(data), r, name=Path(origin).stem)


def dump_algebra_spec(qt: QuasitriangularData) -> dict:
    alg = qt.alg
    brackets = [[i, j, k, str(c)] for (i, j), row in alg.brackets.items() for k, c in row.items()]
    r = [[i, j, str(v)] for (i, j), v in sorted(qt.r.items())]
    return {"dim": alg.dim, "basis": list(alg.labels), "brackets": brackets, "r": r}
