import pytest

from floqsusy.classical import FrequencyModel, solve_classical
from floqsusy.elliptic import Lattice
from floqsusy.states import OscillatorStates

OMEGA0 = 0.5978

_CRITERIA = {}


def record_criterion(key, passed, detail):
    _CRITERIA[key] = (bool(passed), detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA, key=lambda k: (int("".join(c for c in k if c.isdigit())), k)):
        ok, detail = _CRITERIA[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def lattice():
    return Lattice.from_half_periods(2.0, 2.0)


@pytest.fixture(scope="session")
def elliptic_model(lattice):
    return FrequencyModel.elliptic(OMEGA0, lattice)


@pytest.fixture(scope="session")
def elliptic_solution(elliptic_model):
    return solve_classical(elliptic_model)


@pytest.fixture(scope="session")
def elliptic_states(elliptic_solution):
    return OscillatorStates(elliptic_solution)


@pytest.fixture(scope="session")
def constant_solution():
    return solve_classical(FrequencyModel.constant(0.5, 2.0))


@pytest.fixture(scope="session")
def constant_states(constant_solution):
    return OscillatorStates(constant_solution)
