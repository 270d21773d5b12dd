import pytest
import sympy as sp
from fractions import Fraction
from gmpy2 import mpq

from poisson_iso import coefficients as co
from poisson_iso.errors import MalformedNu
from poisson_iso.rational import Q, inverse, parse_rational, rref, solve

from support import taylor

z = sp.symbols("z")
ORDER = 9


def _eq(ours, expr):
    want = taylor(expr, z, ORDER)
    assert [sp.Rational(int(c.numerator), int(c.denominator)) for c in ours[: ORDER + 1]] == want


def test_bernoulli_small():
    assert [co.bernoulli(n) for n in range(7)] == [1, mpq(-1, 2), mpq(1, 6), 0, mpq(-1, 30), 0, mpq(1, 42)]
    for n in range(12):
        assert co.bernoulli(n) == mpq(str(sp.bernoulli(n) if n != 1 else sp.Rational(-1, 2)))


def test_phi_golden():
    phi = co.phi_coefficients(5)
    assert phi[0] == 0
    assert phi[1] == mpq(1, 12)
    assert phi[3] == mpq(-1, 720)
    assert all(phi[k] == 0 for k in (0, 2, 4))


def test_phi_against_sympy():
    _eq(co.phi_coefficients(ORDER), -1 / z + sp.coth(z / 2) / 2)


@pytest.mark.parametrize("nu", [0, sp.Rational(1, 2), 1, 2, sp.Rational(-1, 3)])
def test_psi_nu_against_sympy(nu):
    ours = co.psi_nu_coefficients(mpq(str(nu)), ORDER)
    if nu == 0:
        expr = -1 / z + sp.coth(z / 2) / 2
    else:
        expr = sp.coth(z / 2) / 2 - nu * sp.coth(nu * z)
    _eq(ours, expr)


def test_psi_half_vanishes():
    assert not any(co.psi_nu_coefficients(mpq(1, 2), ORDER))


def test_z_coth_against_sympy():
    _eq(co.z_coth_coefficients(ORDER), (z / 2) * sp.coth(z / 2))


@pytest.mark.parametrize("scale", [1, sp.Rational(1, 2), sp.Rational(-1, 2)])
def test_f_against_sympy(scale):
    w = scale * z
    _eq(co.f_coefficients(ORDER, mpq(str(scale))), w * sp.exp(w) / sp.sinh(w))


def test_dexp_families():
    _eq(co.dexp_left_coefficients(ORDER), (1 - sp.exp(-z)) / z)
    _eq(co.dexp_right_coefficients(ORDER), (sp.exp(z) - 1) / z)
    _eq(co.inverse_dexp_right_coefficients(ORDER), z / (sp.exp(z) - 1))
    _eq(co.exp_coefficients(ORDER, mpq(-3, 2)), sp.exp(-sp.Rational(3, 2) * z))


def test_inverse_dexp_is_inverse():
    prod = co.multiply(co.dexp_right_coefficients(ORDER), co.inverse_dexp_right_coefficients(ORDER), ORDER)
    assert prod == [1] + [0] * ORDER


def test_half_coth_laurent():
    c = co.half_coth_coefficients(7, mpq(1, 2))
    assert c[-1] == 1
    want = taylor(sp.coth(z / 2) / 2 - 1 / z, z, 7)
    for m in range(1, 8, 2):
        assert c[m] == mpq(str(want[m]))
    with pytest.raises(MalformedNu):
        co.half_coth_coefficients(3, 0)


def test_rational_parsing():
    assert parse_rational(" -3/4 ") == mpq(-3, 4)
    assert Q(Fraction(2, 6)) == mpq(1, 3)
    for bad in ("1/0", "x", "1.5", ""):
        with pytest.raises(ValueError):
            parse_rational(bad)
    with pytest.raises(TypeError):
        Q(0.5)


def test_linear_algebra():
    m = [[mpq(2), mpq(1)], [mpq(4), mpq(2)]]
    _, piv = rref(m, 2)
    assert piv == [0]
    assert inverse(m) is None
    x, rank = solve([[mpq(1), mpq(2)], [mpq(3), mpq(4)]], [mpq(5), mpq(6)])
    assert rank == 2 and x == [mpq(-4), mpq(9, 2)]
    assert solve(m, [mpq(1), mpq(0)])[0] is None
    inv = inverse([[mpq(1), mpq(2)], [mpq(3), mpq(4)]])
    assert inv == [[mpq(-2), mpq(1)], [mpq(3, 2), mpq(-1, 2)]]
