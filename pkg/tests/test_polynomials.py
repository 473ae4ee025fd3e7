import math
from fractions import Fraction

import numpy as np
import pytest
from numpy.polynomial.hermite import hermval

from floqsusy.polynomials import (
    ExactPolynomial,
    J_poly,
    J_poly_direct,
    PolynomialFamily,
    Q_poly,
    hermite_poly,
    q_eval,
)


def test_hermite_against_numpy():
    z = np.linspace(-3, 3, 11)
    for n in range(9):
        assert np.allclose(hermite_poly(n)(z), hermval(z, [0] * n + [1]), rtol=1e-13)


@pytest.mark.parametrize("k", range(9))
def test_J_recursion_equals_definition(k):
    assert J_poly(k) == J_poly_direct(k)


def test_small_J_closed_forms():
    assert J_poly(1).coeffs == (Fraction(1), Fraction(0), Fraction(2))
    # J_2 = 4 z^4 + 3 (denominator of the deleted potential for k = 2)
    assert J_poly(2).coeffs == (3, 0, 0, 0, 4)


@pytest.mark.parametrize("k", range(11))
def test_J_positive(k):
    fam = PolynomialFamily("J", k)
    assert fam.certify_positive()
    z = np.linspace(-4, 4, 401)
    assert np.all(fam(z) >= math.factorial(k))


@pytest.mark.parametrize("k", [0, 2, 4, 6, 8])
def test_even_q_positive(k):
    assert PolynomialFamily("q", k).certify_positive()
    assert np.all(q_eval(k, np.linspace(-5, 5, 201)) > 0)


def test_q_relation_to_hermite():
    z = np.linspace(-2, 2, 9)
    for k in range(7):
        ref = (-1j) ** k * 2 ** (-k / 2) * hermval(1j * z, [0] * k + [1])
        assert np.allclose(q_eval(k, z), ref.real, atol=1e-12)
        assert np.allclose(ref.imag, 0, atol=1e-12)


def test_q_derivative():
    z = np.array([0.3, -1.2])
    h = 1e-6
    assert np.allclose(q_eval(4, z, 1), (q_eval(4, z + h) - q_eval(4, z - h)) / (2 * h), rtol=1e-7)


def test_exact_arithmetic():
    p = ExactPolynomial((1, 2, 3))
    assert (p * p).coeffs == (1, 4, 10, 12, 9)
    assert (p - p).coeffs == (0,)
    assert p.deriv(2).coeffs == (6,)
    assert not ExactPolynomial((1, -1, 1)).certify_positive()
    assert Q_poly(3).coeffs == (0, 3, 0, 1)


def test_family_validation():
    with pytest.raises(ValueError):
        PolynomialFamily("x", 1)
    with pytest.raises(ValueError):
        J_poly(-1)
