import pytest
from hypothesis import assume, given

from gen import nonzero_polynomials, nonzero_quaternions, polynomials, quaternions
from quatherm.qpoly import (NEG_INF, QPolynomial, characteristic_polynomial, divide_left,
                            divide_right, product, rho)
from quatherm.scalar import Quaternion

one, i, j, k = (Quaternion(1, 0, 0, 0), Quaternion(0, 1, 0, 0),
                Quaternion(0, 0, 1, 0), Quaternion(0, 0, 0, 1))
z = QPolynomial.z()


def test_products_depend_on_order():
    assert rho(i) * rho(j) == QPolynomial([k, -(i + j), one])
    assert rho(j) * rho(i) == QPolynomial([-k, -(i + j), one])


def test_left_zero_of_product():
    assert (rho(i) * rho(j)).eval_left(i) == 0
    assert (rho(i) * rho(j)).eval_right(j) == 0


def test_backward_shift_example():
    assert (z ** 2).lshift(i) == z + QPolynomial([i])


def test_division_examples():
    assert divide_left(z ** 2 + 1, rho(i)) == (z + QPolynomial([i]), QPolynomial())
    assert divide_right(z ** 2, rho(i)) == (z + QPolynomial([i]), QPolynomial([-one]))


def test_taylor_example():
    vals = (z ** 2).taylor_left(i)
    assert vals == [-one, 2 * i, one]
    rebuilt = sum((rho(i) ** n * QPolynomial([v]) for n, v in enumerate(vals)), QPolynomial())
    assert rebuilt == z ** 2


def test_zero_polynomial():
    assert QPolynomial().degree == NEG_INF
    assert QPolynomial([0, 0]).is_zero()
    with pytest.raises(ZeroDivisionError):
        divide_left(z, QPolynomial())


def test_characteristic_polynomial_kills_class():
    x = characteristic_polynomial(0, 1)
    assert x == z ** 2 + 1
    for a in (i, j, k, (i + j + k) * Quaternion(0, 0, 0, 0) + Quaternion(0, 0, 3, 4) / 5):
        assert x.eval_left(a) == 0 == x.eval_right(a)


@given(polynomials, polynomials, polynomials)
def test_ring_laws(f, g, h):
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert (f * g).conj_sharp() == g.conj_sharp() * f.conj_sharp()


@given(polynomials, polynomials, quaternions)
def test_left_evaluation_product_rule(f, g, a):
    # the value of f g at a: evaluate g at a twisted by f(a)
    fa = f.eval_left(a)
    if fa.is_zero():
        assert (f * g).eval_left(a) == 0
    else:
        assert (f * g).eval_left(a) == fa * g.eval_left(fa.inverse() * a * fa)


@given(polynomials, quaternions)
def test_shift_identities(f, a):
    assert f == QPolynomial([f.eval_left(a)]) + rho(a) * f.lshift(a)
    assert f == QPolynomial([f.eval_right(a)]) + f.rshift(a) * rho(a)


@given(polynomials, nonzero_polynomials)
def test_division_identities(f, g):
    q, r = divide_right(f, g)
    assert f == q * g + r and r.degree < g.degree
    q, r = divide_left(f, g)
    assert f == g * q + r and r.degree < g.degree


@given(polynomials, polynomials)
def test_degree_additive(f, g):
    assert (f * g).degree == f.degree + g.degree


@given(nonzero_polynomials)
def test_monic(f):
    assert f.monic().is_monic() and f.monic_left().is_monic()


@given(quaternions, quaternions)
def test_real_quadratic_factorisation(a, b):
    assume(not a.is_real())
    x = characteristic_polynomial(2 * a.real, a.norm2())
    assert rho(a) * rho(a.conj()) == x == rho(a.conj()) * rho(a)


@given(polynomials, quaternions)
def test_derivative_leibniz(f, a):
    assert (f * rho(a)).derivative() == f.derivative() * rho(a) + f
    assert product([rho(a)] * 3).derivative() == 3 * rho(a) ** 2


def test_float_division_trims_remainder():
    f = (rho(i) * rho(j)).to_backend("float") * Quaternion(0.3, 0.1, 0.0, 0.7)
    q, r = divide_left(f, rho(i).to_backend("float"))
    assert r.is_zero()
