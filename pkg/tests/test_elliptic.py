import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from floqsusy.elliptic import (
    Lattice,
    PoleError,
    epsilon_elliptic,
    lattice_invariants,
    omega_squared,
    sigma,
    solve_d,
    wp,
    wp_prime,
    zeta_w,
)


def _g2_lattice_sum(w1, w3, M=200):
    m, n = np.meshgrid(np.arange(-M, M + 1), np.arange(-M, M + 1))
    w = 2 * m * w1 + 2 * n * w3
    w = w[(m != 0) | (n != 0)]
    return 60 * np.sum(w**-4.0).real


def test_g2_matches_truncated_lattice_sum(lattice):
    ref = _g2_lattice_sum(lattice.omega1, lattice.omega3)
    assert lattice.g2 == pytest.approx(ref, rel=1e-5)


def test_square_lattice_has_vanishing_g3(lattice):
    assert abs(lattice.g3) < 1e-12 * lattice.g2**1.5


def test_lattice_invariants_function_uses_full_periods():
    g2, g3 = lattice_invariants(4.0, 4.0)
    lat = Lattice.from_half_periods(2.0, 2.0)
    assert (g2, g3) == (lat.g2, lat.g3)


def test_roots_satisfy_cubic(lattice):
    e = np.array(lattice.roots)
    assert abs(e.sum()) < 1e-12
    assert np.all(np.abs(4 * e**3 - lattice.g2 * e - lattice.g3) < 1e-12)
    assert e[0] > e[1] > e[2]


def test_legendre_relation(lattice):
    lhs = lattice.eta1 * lattice.omega3 - lattice.eta3 * lattice.omega1
    assert lhs == pytest.approx(0.5j * np.pi, abs=1e-13)


def test_laurent_expansion_near_origin(lattice):
    z = 1e-2 * np.exp(0.3j)
    assert wp(z, lattice) == pytest.approx(1 / z**2 + lattice.g2 * z**2 / 20, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3))
def test_wp_is_doubly_periodic(a, b):
    lat = Lattice.from_half_periods(2.0, 2.0)
    z = complex(a, b)
    if lat.distance_to_lattice(z) < 0.05:
        return
    v = wp(z, lat)
    for shift in (lat.real_period, 1j * lat.imag_period):
        assert wp(z + shift, lat) == pytest.approx(v, rel=1e-10, abs=1e-10)


def test_wp_prime_and_zeta_derivatives(lattice):
    z = np.array([0.7 + 0.3j, 1.3 - 1.1j, -0.4 + 1.7j])
    h = 1e-5
    fd_wp = (wp(z + h, lattice) - wp(z - h, lattice)) / (2 * h)
    assert np.allclose(wp_prime(z, lattice), fd_wp, rtol=1e-8)
    fd_zeta = (zeta_w(z + h, lattice) - zeta_w(z - h, lattice)) / (2 * h)
    assert np.allclose(fd_zeta, -wp(z, lattice), rtol=1e-8)
    fd_sig = (sigma(z + h, lattice) - sigma(z - h, lattice)) / (2 * h)
    assert np.allclose(fd_sig / sigma(z, lattice), zeta_w(z, lattice), rtol=1e-8)


def test_differential_equation_of_wp(lattice):
    z = np.array([0.5 + 0.2j, 1.1 + 1.9j])
    p, dp = wp(z, lattice), wp_prime(z, lattice)
    assert np.allclose(dp**2, 4 * p**3 - lattice.g2 * p - lattice.g3, rtol=1e-10)


def test_sigma_quasi_periodicity(lattice):
    z = 0.37 + 0.21j
    w1 = lattice.omega1
    lhs = sigma(z + 2 * w1, lattice)
    rhs = -np.exp(2 * lattice.eta1 * (z + w1)) * sigma(z, lattice)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_pole_raises(lattice):
    with pytest.raises(PoleError):
        wp(lattice.real_period, lattice)


def test_invalid_lattice():
    with pytest.raises(ValueError):
        Lattice(-1.0, 2.0)


def test_solve_d_reference_model(lattice):
    par = solve_d(0.5978, lattice)
    assert abs(wp(par.d, lattice) + 4 * 0.5978**2) < 1e-12
    # -4 omega0^2 with omega0 = 0.5978
    assert np.real(wp(par.d, lattice)) == pytest.approx(-1.42947, abs=5e-5)
    assert par.zeta_d == pytest.approx(zeta_w(par.d, lattice), rel=1e-14)


def test_solve_d_zero_frequency(lattice):
    par = solve_d(0.0, lattice)
    assert abs(wp(par.d, lattice)) < 1e-8


def test_frequency_is_real_positive_and_periodic(lattice):
    t = np.linspace(0, lattice.real_period, 101)
    w2 = omega_squared(t, 0.5978, lattice)
    assert np.max(np.abs(np.imag(w2))) < 1e-12
    assert np.all(np.real(w2) > 0)
    assert np.allclose(w2[0], w2[-1], rtol=1e-12)


def test_envelope_solves_its_equation(lattice):
    par = solve_d(0.5978, lattice)
    t = np.linspace(0.1, 3.9, 9)
    h = 1e-4
    e = lambda s: epsilon_elliptic(s, par, lattice)
    eddot = (e(t + h) - 2 * e(t) + e(t - h)) / h**2
    w2 = omega_squared(t, 0.5978, lattice)
    assert np.max(np.abs(eddot + 4 * w2 * e(t))) < 1e-5 * np.max(np.abs(e(t)))
    _, ed = epsilon_elliptic(t, par, lattice, derivative=True)
    assert np.allclose(ed, (e(t + h) - e(t - h)) / (2 * h), rtol=1e-7)
