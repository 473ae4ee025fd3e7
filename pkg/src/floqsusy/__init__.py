"""Floquet quasienergies, Darboux transformations and Berry phases of the
time-periodic harmonic oscillator with an elliptic-function frequency."""

from .berry import BerryReport, beta0, beta_n, berry_numeric, I_n, mean_energy_psi
from .classical import (
    ClassicalSolution,
    FrequencyModel,
    Stability,
    UnstableError,
    floquet_exponent,
    integrate_classical,
    solve_classical,
)
from .darboux import CreationTransform, DeletionTransform, potential_created, potential_deleted
from .elliptic import Lattice, solve_d
from .states import OscillatorStates, quasienergy
from .verify import Grid, propagate, schrodinger_residual, spectroscopy

__version__ = "0.1.0"

__all__ = [
    "BerryReport", "beta0", "beta_n", "berry_numeric", "I_n", "mean_energy_psi",
    "ClassicalSolution", "FrequencyModel", "Stability", "UnstableError", "floquet_exponent",
    "integrate_classical", "solve_classical", "CreationTransform", "DeletionTransform",
    "potential_created", "potential_deleted", "Lattice", "solve_d", "OscillatorStates",
    "quasienergy", "Grid", "propagate", "schrodinger_residual", "spectroscopy",
]
