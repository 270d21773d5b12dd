import json
from fractions import Fraction

import pytest
from gmpy2 import mpq

from poisson_iso.errors import (
    AlgebraInputError,
    AntisymmetryViolation,
    JacobiViolation,
    QuasitriangularViolation,
)
from poisson_iso.lie_core import (
    LieAlgebra,
    LieAlgebraData,
    QuasitriangularData,
    abelian,
    cyb,
    dump_algebra_spec,
    gl2,
    is_invariant,
    load_algebra,
    sl2,
    validate_algebra,
)

from support import brute_bracket, brute_cyb, matrix_bracket_constants

SL2_CONSTS = {(0, 1, 1): 2, (0, 2, 2): -2, (1, 2, 0): 1}


def test_validate_abelian():
    assert validate_algebra(LieAlgebraData(3, ("a", "b", "c"), {})).ok


def test_validate_sl2():
    assert validate_algebra(LieAlgebraData(3, ("h", "e", "f"), SL2_CONSTS)).ok


def test_structure_constants_match_matrices():
    alg = sl2().alg
    oracle = matrix_bracket_constants()
    for i in range(3):
        for j in range(3):
            got = alg.bracket({i: mpq(1)}, {j: mpq(1)})
            want = {k: c for (a, b, k), c in oracle.items() if (a, b) == (i, j)}
            assert got == want


def test_one_sided_flip_is_antisymmetry_violation():
    consts = dict(SL2_CONSTS)
    consts[(1, 0, 1)] = 2  # should be -2 given (0, 1, 1) = 2
    with pytest.raises(AntisymmetryViolation) as exc:
        validate_algebra(LieAlgebraData(3, ("h", "e", "f"), consts))
    assert exc.value.args


def test_jacobi_violation():
    # [e0,e1]=e2, [e1,e2]=e0, [e0,e2]=e0 breaks Jacobi
    consts = {(0, 1, 2): 1, (1, 2, 0): 1, (0, 2, 0): 1}
    with pytest.raises(JacobiViolation):
        validate_algebra(LieAlgebraData(3, ("a", "b", "c"), consts))


def test_index_out_of_range():
    with pytest.raises(AlgebraInputError):
        validate_algebra(LieAlgebraData(2, ("a", "b"), {(0, 1, 5): 1}))


def test_cyb_zero_and_sl2():
    qt = sl2()
    assert cyb(qt.alg, {}) == {}
    assert cyb(qt.alg, qt.r) == {}
    assert brute_cyb(matrix_bracket_constants(), qt.r) == {}


def test_cyb_defect_without_symmetric_part():
    alg = sl2().alg
    r = {(1, 2): mpq(1)}
    defect = cyb(alg, r)
    assert defect
    assert defect == brute_cyb(matrix_bracket_constants(), r)
    with pytest.raises(QuasitriangularViolation):
        QuasitriangularData(alg, r)


def test_invariance_of_t():
    for qt in (sl2(), gl2(), abelian(2)):
        assert is_invariant(qt.alg, qt.t)
    assert not is_invariant(sl2().alg, {(1, 2): mpq(1)})


def test_parts_of_r():
    qt = sl2()
    assert qt.t == {(0, 0): mpq(1, 2), (1, 2): mpq(1), (2, 1): mpq(1)}
    assert qt.r0 == {(1, 2): mpq(1, 2), (2, 1): mpq(-1, 2)}
    assert qt.factorizable
    assert not abelian(2).factorizable


def test_cobracket_examples():
    qt = sl2()
    assert qt.cobracket({0: mpq(1)}) == {}
    # brute force over the matrix bracket
    consts = matrix_bracket_constants()
    want: dict = {}
    for (a, b), v in qt.r.items():
        for k, c in brute_bracket(consts, {1: 1}, {a: 1}).items():
            want[(k, b)] = want.get((k, b), 0) + v * c
        for k, c in brute_bracket(consts, {1: 1}, {b: 1}).items():
            want[(a, k)] = want.get((a, k), 0) + v * c
    want = {k: v for k, v in want.items() if v}
    assert qt.cobracket({1: mpq(1)}) == want
    # by hand: e⊗[e,f] + ¼([e,h]⊗h + h⊗[e,h]) = ½ e⊗h − ½ h⊗e
    assert want == {(1, 0): mpq(1, 2), (0, 1): mpq(-1, 2)}
    assert abelian(2).cobracket({0: mpq(1)}) == {}


def test_dual_bracket_is_transpose_of_cobracket():
    qt = sl2()
    for a in range(3):
        for b in range(3):
            db = qt.dual_bracket({a: mpq(1)}, {b: mpq(1)})
            for c in range(3):
                assert db.get(c, 0) == qt.cobracket({c: mpq(1)}).get((a, b), 0)
    assert abelian(2).dual_bracket({0: mpq(1)}, {1: mpq(1)}) == {}


def test_dual_bracket_bilinear():
    qt = gl2()
    x, y, z = {0: mpq(2, 3), 3: mpq(-1)}, {1: mpq(1, 2)}, {2: mpq(3), 0: mpq(1)}
    s = {k: x.get(k, 0) + mpq(5) * y.get(k, 0) for k in set(x) | set(y)}
    lhs = qt.dual_bracket(s, z)
    a, b = qt.dual_bracket(x, z), qt.dual_bracket(y, z)
    for k in range(4):
        assert lhs.get(k, 0) == a.get(k, 0) + 5 * b.get(k, 0)


def test_l_and_r_maps():
    qt = sl2()
    for a in range(3):
        lam = {a: mpq(1)}
        L, R, T = qt.L_map(lam), qt.R_map(lam), qt.t_contract(lam)
        for k in range(3):
            assert L.get(k, 0) - R.get(k, 0) == T.get(k, 0)


def test_builtins_load():
    for name in ("sl2", "gl2", "abelian1", "abelian2"):
        assert load_algebra(name).name == name


def test_file_round_trip(tmp_path):
    doc = dump_algebra_spec(gl2())
    path = tmp_path / "gl2.json"
    path.write_text(json.dumps(doc))
    qt = load_algebra(str(path))
    assert qt.r == gl2().r and qt.alg.brackets == gl2().alg.brackets


@pytest.mark.parametrize("text, fragment", [
    ("{", "line 1"),
    ('{"dim": 2}', "missing field"),
    ('{"dim": 1, "basis": ["x"], "brackets": [], "r": [[0, 3, "1"]]}', "r[0]"),
    ('{"dim": 1, "basis": ["x"], "brackets": [], "r": [[0, 0, 0.5]]}', "p/q"),
    ('{"dim": 1, "basis": ["x"], "brackets": [], "r": [], "extra": 1}', "unknown field"),
])
def test_file_diagnostics(tmp_path, text, fragment):
    path = tmp_path / "bad.json"
    path.write_text(text)
    with pytest.raises(AlgebraInputError, match=fragment.replace("[", r"\[").replace("]", r"\]")):
        load_algebra(str(path))


def test_fraction_inputs_accepted():
    data = LieAlgebraData(2, ("a", "b"), {(0, 1, 1): Fraction(1, 2)})
    assert LieAlgebra(data).bracket({0: mpq(1)}, {1: mpq(1)}) == {1: mpq(1, 2)}
