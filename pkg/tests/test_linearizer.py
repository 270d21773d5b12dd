import random
from pathlib import Path

import pytest
from gmpy2 import mpq

from poisson_iso.errors import DegreeOverflow, Inconsistent, NotInvariant
from poisson_iso.lie_core import abelian, gl2, sl2
from poisson_iso.lie_series import GroupMap
from poisson_iso.linearizer import (
    corrector_rank,
    corrector_solve,
    initial_map,
    lemma1_residual,
    solve_g,
    twisted_r0,
)
from poisson_iso.rmatrix import rho_am
from poisson_iso.series import TensorSeries, alternate, constant, contract_lambda, differential, space

from support import rand_scalar, rand_vector

GOLDEN = Path(__file__).parent / "golden"
QT = sl2()


@pytest.fixture(scope="module")
def sl2_solution():
    return solve_g(QT, 4, keep_states=True)


def test_initial_map_is_minus_half_r():
    g0 = initial_map(QT, 3)
    want = contract_lambda(constant(QT.r, 3, 2), 1) * mpq(-1, 2)
    assert g0.A == want
    assert initial_map(abelian(2), 3).A.is_zero()


def test_twisted_r0_identity():
    rho = twisted_r0(QT, GroupMap.identity(QT.alg, 3))
    # valid one degree below log g
    assert rho == constant(QT.r0, 3, 2)


def test_twisted_r0_abelian_exact_form():
    ab = abelian(2)
    f = rand_scalar(random.Random(1), 2, (2, 3), 4)
    assert twisted_r0(ab, GroupMap(differential(f))).is_zero()
    A = rand_vector(random.Random(2), 2, (1, 2), 3)
    assert twisted_r0(ab, GroupMap(A)) == alternate(differential(A))


def test_corrector_zero():
    sp3 = space(3)
    beta = corrector_solve(TensorSeries(2, sp3, 2), 2)
    assert beta.is_zero()


@pytest.mark.parametrize("degree", [1, 2, 3])
def test_corrector_round_trip(degree):
    rng = random.Random(degree)
    beta0 = rand_vector(rng, 3, (degree + 1,), degree + 1)
    alpha = alternate(differential(beta0))
    beta = corrector_solve(alpha)
    assert alternate(differential(beta)) == alpha
    assert beta.degrees() == [degree + 1]


def test_corrector_inconsistent():
    sp3 = space(3)
    # α = λ_h (e⊗f − f⊗e) is not closed, so it is not Alt(dβ) for any β
    alpha = TensorSeries(2, sp3, 1, {((1, 2), sp3.var(0)): 1, ((2, 1), sp3.var(0)): -1})
    with pytest.raises(Inconsistent):
        corrector_solve(alpha)


def test_corrector_ranks():
    assert [corrector_rank(3, d + 1) for d in range(5)] == [(3, 6), (8, 10), (15, 15), (24, 21), (35, 28)]


def test_solve_sl2_n4(sl2_solution):
    sol = sl2_solution
    assert sol.ok and sol.residual.is_zero(4)
    assert sol.g.A.truncate(1) == initial_map(QT, 5).A.truncate(1)
    assert sol.g.A.coefficient((2,), (1, 1, 0)) == mpq(-1, 12)
    assert sol.g.A.coefficient((1,), (1, 0, 1)) == mpq(-5, 48)
    assert [t["residual_terms"] for t in sol.trace] == [0, 6, 8, 12, 14]


def test_solve_golden(sl2_solution):
    want = (GOLDEN / "sl2_N4_log_g.txt").read_text().strip()
    assert sl2_solution.g.A.render(labels=("h", "e", "f")) == want


def test_initial_map_is_not_exact_at_degree_one():
    """exp(−r/2) already has a degree-1 defect; the solver removes it."""
    diff = twisted_r0(QT, initial_map(QT, 2)) - rho_am(QT, 1).value
    assert diff.is_zero(0) and not diff.is_zero(1)
    assert solve_g(QT, 1).ok


def test_solve_abelian_exact():
    sol = solve_g(abelian(2), 5)
    assert sol.ok and sol.g.A.is_zero()
    assert all(t["residual_terms"] == 0 for t in sol.trace)


def test_solve_gl2():
    assert solve_g(gl2(), 3).ok


@pytest.mark.parametrize("n", [0, 7])
def test_degree_bounds(n):
    with pytest.raises(DegreeOverflow):
        solve_g(QT, n)


def test_lemma1_degenerate_case():
    rho = rho_am(QT, 4).value
    res, n = lemma1_residual(QT, rho, rho)
    assert res.is_zero()


def test_lemma1_on_solver_states(sl2_solution):
    rho_inv = rho_am(QT, 4).value
    assert len(sl2_solution.states) == 5
    for st in sl2_solution.states:
        res, n = lemma1_residual(QT, st.rho, rho_inv)
        assert res.is_zero(min(n, res.prec))


def test_lemma1_detects_perturbation(sl2_solution):
    st = sl2_solution.states[2]
    rho_inv = rho_am(QT, 4).value
    key = next(iter(st.residual.homogeneous(2).terms))
    bump = TensorSeries(2, st.rho.space, st.rho.prec, {key: 1, ((key[0][1], key[0][0]), key[1]): -1})
    res, n = lemma1_residual(QT, st.rho + bump, rho_inv)
    assert not res.is_zero(min(n, res.prec))


def test_lemma1_requires_invariant_part():
    rho = rho_am(QT, 4).value
    with pytest.raises(NotInvariant):
        lemma1_residual(QT, rho, constant(QT.r0, 3, 4))
