"""Total, dynamical and geometric phases over one period.

For ``psi_n`` the phase integrand splits as::

    <psi_n|i d/dt psi_n> = (2n+1)/(8 gamma) - (1/8) <x^2> (ln gamma)'',   <x^2> = 4 gamma (2n+1)

The first term integrates to ``E_n T``.  With ``chi = -int_0^T <psi|i psi_t> dt``
the report stores ``dynamical = -E_n T`` and ``beta = chi - dynamical``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.special import erfcx

from .elliptic import ConvergenceError
from .states import inner, x_grid

__all__ = [
    "BerryReport",
    "LaurentPoly",
    "mean_energy_psi",
    "I_0",
    "I_n",
    "I_n_quad",
    "I_hat",
    "beta0",
    "beta_n",
    "berry_numeric",
]


@dataclass(frozen=True)
class BerryReport:
    n: int
    chi: float
    dynamical: float
    beta: float
    system: str = "original"


def mean_energy_psi(solution, n, t):
    """``(dynamical, geometric)`` parts of ``<psi_n|i d/dt psi_n>`` at ``t``."""
    g = solution.gamma(t)
    dyn = (2 * n + 1) / (8.0 * g)
    geo = -0.5 * g * (2 * n + 1) * solution.log_gamma_ddot(t)
    return dyn, geo


class LaurentPoly:
    """Finite Laurent polynomial in ``a`` with exact rational coefficients."""

    def __init__(self, terms=None):
        self.terms = {p: Fraction(c) for p, c in (terms or {}).items() if c != 0}

    def __add__(self, other):
        out = dict(self.terms)
        for p, c in other.terms.items():
            out[p] = out.get(p, 0) + c
        return LaurentPoly(out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return LaurentPoly({p: v * c for p, v in self.terms.items()})

    def shift(self, k):
        """Multiply by ``a^k``."""
        return LaurentPoly({p + k: v for p, v in self.terms.items()})

    def deriv(self):
        return LaurentPoly({p - 1: v * p for p, v in self.terms.items() if p})

    def __call__(self, a):
        return sum(float(c) * a**p for p, c in self.terms.items())


@lru_cache(maxsize=None)
def _I_rep(n):
    """``(P_n, Q_n)`` with ``I_n(a) = sqrt(pi) P_n(a) + Q_n(a) I_0(a)``."""
    if n == 0:
        return LaurentPoly(), LaurentPoly({0: 1})
    if n == 1:
        return LaurentPoly({0: 4}), LaurentPoly({1: -4})
    P1, Q1 = _I_rep(n - 1)
    P2, Q2 = _I_rep(n - 2)
    # I0' = I0 (1 - 1/(2a)) - sqrt(pi)/a
    dP = P1.deriv() - Q1.shift(-1)
    dQ = Q1.deriv() + Q1 - Q1.shift(-1).scale(Fraction(1, 2))
    c2 = 4 * (n - 1) ** 2
    P = P1.scale(-2) + P2.scale(c2) - dP.shift(1).scale(4)
    Q = Q1.scale(-2) + Q2.scale(c2) - dQ.shift(1).scale(4)
    return P, Q


def I_0(a):
    """``pi a^(-1/2) e^a erfc(sqrt a)``, evaluated overflow-free through ``erfcx``."""
    if a <= 0:
        raise ValueError("a must be positive")
    return math.pi * float(erfcx(math.sqrt(a))) / math.sqrt(a)


def I_n(a, n):
    """``int H_n(x)^2 exp(-x^2) / (x^2 + a) dx`` by the recursion in ``n``.

    ``I_{n-1}'(a)`` is taken from the exact Laurent representation, so no
    numerical differentiation is involved.  For large ``a`` the two terms
    cancel; when that costs more than ~6 digits the quadrature is used.
    """
    if a <= 0:
        raise ValueError("a must be positive")
    if n < 0:
        raise ValueError("n must be non-negative")
    P, Q = _I_rep(n)
    p, q = math.sqrt(math.pi) * P(a), Q(a) * I_0(a)
    val = p + q
    if (abs(p) + abs(q)) > 1e6 * abs(val):
        return I_n_quad(a, n)
    return val


def I_n_quad(a, n):
    """Adaptive quadrature of the defining integral (reference values)."""
    from numpy.polynomial.hermite import hermval

    c = [0] * n + [1]
    f = lambda x: hermval(x, c) ** 2 * math.exp(-x * x) / (x * x + a)
    val, err = quad(f, -np.inf, np.inf, epsabs=0, epsrel=1e-13, limit=400)
    return val


def I_hat(n, a=0.5):
    """``I_n(a)`` divided by the norm ``2^n n! sqrt(pi)`` of ``H_n``."""
    return I_n(a, n) / (2**n * math.factorial(n) * math.sqrt(math.pi))


def beta0(solution, both=False):
    """``beta_0^0 = -1/2 int_0^T gamma'^2/gamma dt``.

    With ``both=True`` returns also ``1/2 int_0^T gamma (ln gamma)'' dt``.
    """
    T = solution.period
    opts = dict(epsabs=1e-14, epsrel=1e-12, limit=400)
    primary = -0.5 * quad(lambda t: solution.gamma_dot(t) ** 2 / solution.gamma(t), 0.0, T, **opts)[0]
    if not both:
        return primary
    second = 0.5 * quad(lambda t: solution.gamma(t) * solution.log_gamma_ddot(t), 0.0, T, **opts)[0]
    return primary, second


def beta_n(n, system="original", solution=None, b00=None, literal=False):
    """Closed-form geometric phase.

    ``original``: ``(2n+1) beta_0^0``.  ``transformed_k2``:
    ``beta_n^0 + 2 (1 - I^_n/(n+3)) beta_0^0`` with the normalised ``I^_n``
    (:func:`I_hat`).  ``literal=True`` uses the unnormalised ``I_n(1/2)``.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if b00 is None:
        if solution is None:
            raise ValueError("give a solution or b00")
        b00 = beta0(solution)
    b = (2 * n + 1) * b00
    if system == "original":
        return b
    if system == "transformed_k2":
        i_n = I_n(0.5, n) if literal else I_hat(n)
        return b + 2.0 * (1.0 - i_n / (n + 3)) * b00
    raise ValueError(f"unknown system {system!r}")


def _phase_integrand(state, t, x):
    f = state(x, t)
    return float(np.real(inner(f, 1j * state.dt(x, t), x)))


def berry_numeric(state, potential=None, samples=128, nmax=None, tol=1e-8, system="original"):
    """Brute-force phases of ``state`` over one period.

    ``<f|i f_t>`` is computed by x-quadrature with a finite-difference time
    derivative on ``samples`` equispaced times (trapezoid rule, spectrally
    accurate for periodic integrands).  The dynamical part
    ``(index + 1/2)/(4 gamma)`` is integrated analytically from the same grid,
    the remainder is geometric.  ``potential(x, t)``, if given, is used to
    check that ``state`` solves its Schrodinger equation.
    """
    sol = state.solution
    T = sol.period
    idx = state.index
    nmax = max(abs(idx), 2) + 4 if nmax is None else nmax
    if potential is not None:
        x = x_grid(sol, 0.3 * T, nmax)
        d = state.derivs(x, 0.3 * T, 2)
        r = 1j * state.dt(x, 0.3 * T) + d[2] - potential(x, 0.3 * T) * d[0]
        if np.max(np.abs(r)) > 1e-5 * np.max(np.abs(d[0])):
            raise ValueError("state does not solve the equation with the given potential")

    def totals(m):
        ts = np.arange(m) * (T / m)
        tot = np.array([_phase_integrand(state, t, x_grid(sol, t, nmax)) for t in ts])
        dyn = (idx + 0.5) / (4.0 * sol.gamma(ts))
        return T * tot.mean(), T * dyn.mean()

    tot, dyn = totals(samples)
    tot_h, _ = totals(samples // 2)
    if abs(tot - tot_h) > max(tol, 1e-6 * abs(tot)):
        raise ConvergenceError(f"phase integral not converged: {tot} vs {tot_h}")
    chi = -tot
    dynamical = -dyn
    return BerryReport(n=idx, chi=chi, dynamical=dynamical, beta=chi - dynamical, system=system)
