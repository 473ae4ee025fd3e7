import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from floqsusy import berry, darboux
from floqsusy.classical import ClassicalSolution
from floqsusy.elliptic import ConvergenceError
from floqsusy.states import OscillatorStates, inner, x_grid


def _phase_integrand(state, t):
    x = x_grid(state.solution, t, nmax=8)
    return float(np.real(inner(state(x, t), 1j * state.dt(x, t), x)))


def test_mean_energy_matches_quadrature(elliptic_states):
    sol = elliptic_states.solution
    for n in (0, 2):
        for t in np.linspace(0.1, 3.9, 10):
            dyn, geo = berry.mean_energy_psi(sol, n, t)
            assert dyn + geo == pytest.approx(_phase_integrand(elliptic_states.state(n), t), abs=1e-6)


def test_static_limit_of_integrand(constant_solution):
    for n in range(3):
        dyn, geo = berry.mean_energy_psi(constant_solution, n, 0.7)
        assert geo == 0.0
        assert dyn == pytest.approx((2 * n + 1) * 0.5)


def test_dynamical_part_integrates_to_quasienergy(elliptic_states):
    sol = elliptic_states.solution
    ts = np.linspace(0, sol.period, 257)[:-1]
    for n in (0, 3):
        dyn = np.mean([berry.mean_energy_psi(sol, n, t)[0] for t in ts]) * sol.period
        assert dyn == pytest.approx(elliptic_states.quasienergy(n) * sol.period, rel=1e-12)


def test_beta0_two_forms(elliptic_solution):
    a, b = berry.beta0(elliptic_solution, both=True)
    assert abs(a - b) < 1e-8
    assert a <= 0
    assert a == pytest.approx(-0.0149, abs=5e-4)


def test_beta0_constant(constant_solution):
    assert berry.beta0(constant_solution) == 0.0


def test_beta_n_formulas(elliptic_solution):
    b = berry.beta0(elliptic_solution)
    assert berry.beta_n(1, "original", b00=b) == pytest.approx(3 * b)
    i0 = berry.I_n(0.5, 0) / math.sqrt(math.pi)
    assert berry.beta_n(0, "transformed_k2", b00=b) == pytest.approx(b * (3 - 2 * i0 / 3))
    # as printed, with the unnormalised I_0(1/2)
    lit = berry.beta_n(0, "transformed_k2", b00=b, literal=True)
    assert lit == pytest.approx(b * (3 - 2 * berry.I_n(0.5, 0) / 3))
    assert lit / b == pytest.approx(1.4504, abs=1e-4)
    with pytest.raises(ValueError):
        berry.beta_n(0, "other", b00=b)
    with pytest.raises(ValueError):
        berry.beta_n(0)


def test_I_n_examples():
    i0 = berry.I_n(0.5, 0)
    assert i0 == pytest.approx(2.3244, abs=1e-4)
    assert i0 == pytest.approx(berry.I_n_quad(0.5, 0), rel=1e-12)
    assert berry.I_n(0.5, 1) == pytest.approx(4 * math.sqrt(math.pi) - 2 * i0, rel=1e-14)
    assert berry.I_n(0.5, 1) == pytest.approx(2.4411, abs=1e-4)
    with pytest.raises(ValueError):
        berry.I_n(0.0, 2)
    with pytest.raises(ValueError):
        berry.I_n(1.0, -1)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 20.0), st.integers(0, 8))
def test_I_n_recursion_against_quadrature(a, n):
    val = berry.I_n(a, n)
    assert val > 0
    assert val == pytest.approx(berry.I_n_quad(a, n), rel=1e-8)


def test_transformed_integrand_shift(elliptic_states):
    sol = elliptic_states.solution
    for n in (0, 2):
        phi = darboux.PhiK2State(elliptic_states, n)
        ihat = berry.I_hat(n)
        for t in np.linspace(0.3, 3.7, 5):
            diff = _phase_integrand(phi, t) - _phase_integrand(elliptic_states.state(n), t)
            ref = -(1 - ihat / (n + 3)) * sol.gamma(t) * sol.log_gamma_ddot(t)
            assert diff == pytest.approx(ref, abs=1e-5)


def test_numeric_reproduces_decomposition(elliptic_states):
    sol = elliptic_states.solution
    b = berry.beta0(sol)
    rep = berry.berry_numeric(elliptic_states.state(1), elliptic_states.potential, samples=64)
    assert rep.beta == pytest.approx(3 * b, abs=1e-6)
    assert rep.dynamical == pytest.approx(-elliptic_states.quasienergy(1) * sol.period, rel=1e-10)
    assert rep.chi == pytest.approx(rep.dynamical + rep.beta)


def test_numeric_on_created_state(elliptic_states):
    tr = darboux.CreationTransform(elliptic_states, 2)
    rep = berry.berry_numeric(tr.created_state(), tr.V, samples=64)
    assert rep.n == -3
    assert rep.dynamical == pytest.approx(2.5 * elliptic_states.delta * elliptic_states.period, rel=1e-10)
    assert abs(rep.beta) < 0.1


def test_numeric_rejects_inconsistent_potential(elliptic_states):
    with pytest.raises(ValueError):
        berry.berry_numeric(elliptic_states.state(0), lambda x, t: elliptic_states.potential(x, t) + 1.0)


def test_numeric_reports_nonconvergence(elliptic_states):
    with pytest.raises(ConvergenceError):
        berry.berry_numeric(elliptic_states.state(3), samples=4)


def test_phases_invariant_under_envelope_rotation(elliptic_solution):
    sol = elliptic_solution
    rot = ClassicalSolution(lambda t: np.exp(0.9j) * sol.eps(t),
                            lambda t: np.exp(0.9j) * sol.eps_dot(t), sol.model)
    assert berry.beta0(rot) == pytest.approx(berry.beta0(sol), abs=1e-15)
    r1 = berry.berry_numeric(OscillatorStates(rot).state(0), samples=32)
    r0 = berry.berry_numeric(OscillatorStates(sol).state(0), samples=32)
    assert r1.beta == pytest.approx(r0.beta, abs=1e-9)
