"""Quasienergy states of ``h0 = -d^2/dx^2 + omega(t)^2 x^2``.

    psi_n = (conj(eps)/eps)^(n/2+1/4) exp(i gamma' z^2) N_n gamma^(-1/4) H_n(z) exp(-z^2/2),
    z = x / sqrt(8 gamma),  N_n = (2^(n+1) n! sqrt(2 pi))^(-1/2).

The fractional power is taken from the continuous phase of ``eps``.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import trapezoid

from . import _gauss
from .classical import ClassicalSolution, PhaseTracker

__all__ = [
    "PhaseTracker",
    "StateEvaluator",
    "HarmonicState",
    "OscillatorStates",
    "FirstOrderOperator",
    "quasienergy",
    "g_eigenvalue",
    "ladder_apply",
    "x_grid",
    "inner",
    "norm2",
]


def quasienergy(n, delta, period=None):
    """``(n + 1/2) delta``; with ``period`` also the class modulo ``2 pi / T``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    e = (n + 0.5) * delta
    if period is None:
        return e
    return e, float(np.mod(e, 2 * np.pi / period))


def g_eigenvalue(n):
    """Eigenvalue ``(2n+1)/8`` of the symmetry operator ``g = (a a+ + a+ a)/2``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return (2 * n + 1) / 8


def ladder_apply(direction, n):
    """Coefficient and target level of ``a`` (``"lower"``) or ``a+`` (``"raise"``) on ``psi_n``.

    Lowering ``psi_0`` returns ``(0.0, 0)``: the ground state is annihilated.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if direction == "lower":
        if n == 0:
            return 0.0, 0
        return math.sqrt(n) / 2, n - 1
    if direction == "raise":
        return math.sqrt(n + 1) / 2, n + 1
    raise ValueError(f"direction must be 'lower' or 'raise', not {direction!r}")


def _broadcast(x, t):
    x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    return x, t


class StateEvaluator:
    """A solution ``(x, t) -> complex`` of a Schrodinger equation.

    Subclasses implement :meth:`derivs`, returning exact x-derivatives.  The
    state behaves like ``(conj(eps)/eps)^(index/2 + 1/4)`` in time, so its
    quasienergy is ``(index + 1/2) * delta``.
    """

    def __init__(self, solution: ClassicalSolution, index, label=""):
        self.solution = solution
        self.index = index
        self.label = label

    @property
    def period(self):
        return self.solution.period

    @property
    def quasienergy(self):
        return (self.index + 0.5) * self.solution.delta

    def derivs(self, x, t, m):
        """List ``[f, f_x, ..., d^m f/dx^m]`` at broadcast ``(x, t)``."""
        raise NotImplementedError

    def __call__(self, x, t):
        return self.derivs(x, t, 0)[0]

    def dx(self, x, t, order=1):
        return self.derivs(x, t, order)[order]

    def dt(self, x, t, h=None):
        """Time derivative by the fourth-order central difference, default step ``T*1e-4``."""
        h = self.period * 1e-4 if h is None else h
        t = np.asarray(t, dtype=float)
        return (
            -self(x, t + 2 * h) + 8 * self(x, t + h) - 8 * self(x, t - h) + self(x, t - 2 * h)
        ) / (12 * h)

    def __repr__(self):
        return f"<{type(self).__name__} {self.label}>"


class HarmonicState(StateEvaluator):
    """``psi_n`` of the driven oscillator."""

    def __init__(self, solution, n):
        if n < 0:
            raise ValueError("n must be non-negative")
        super().__init__(solution, n, f"psi_{n}")
        self.n = n
        self.norm_const = (2.0 ** (n + 1) * math.factorial(n) * math.sqrt(2 * math.pi)) ** -0.5

    def amplitude(self, t):
        """Time-dependent prefactor ``(conj(eps)/eps)^p N_n gamma^(-1/4)``."""
        s = self.solution
        p = self.n / 2 + 0.25
        return np.exp(-2j * p * s.arg_eps(t)) * self.norm_const * s.gamma(t) ** -0.25

    def derivs(self, x, t, m):
        x, t = _broadcast(x, t)
        s = self.solution
        g = s.gamma(t)
        scale = np.sqrt(8.0 * g)
        z = x / scale
        kappa = 1j * s.gamma_dot(t) - 0.5
        base = self.amplitude(t) * np.exp(kappa * z**2)
        vals = _gauss.leibniz(_gauss.hermite_derivs(self.n, z, m), z, kappa, m)
        return [base * v / scale**j for j, v in enumerate(vals)]


class FirstOrderOperator:
    """``c1(t) d/dx + c0(t) x`` acting on derivative lists."""

    def __init__(self, c1, c0):
        self.c1, self.c0 = c1, c0

    def apply(self, derivs, x, t):
        """Derivatives (one order fewer than supplied) of the image."""
        x, t = _broadcast(x, t)
        c1, c0 = self.c1(t), self.c0(t)
        out = []
        for j in range(len(derivs) - 1):
            term = c1 * derivs[j + 1] + c0 * x * derivs[j]
            if j:
                term = term + j * c0 * derivs[j - 1]
            out.append(term)
        return out


class OscillatorStates:
    """Factory for ``psi_n``, ladder operators and quadrature on a classical solution."""

    def __init__(self, solution: ClassicalSolution):
        self.solution = solution
        self._cache = {}

    @property
    def delta(self):
        return self.solution.delta

    @property
    def period(self):
        return self.solution.period

    def state(self, n) -> HarmonicState:
        if n not in self._cache:
            self._cache[n] = HarmonicState(self.solution, n)
        return self._cache[n]

    def psi(self, n, x, t):
        return self.state(n)(x, t)

    def quasienergy(self, n):
        return quasienergy(n, self.delta)

    def z(self, x, t):
        return np.asarray(x) / np.sqrt(8.0 * self.solution.gamma(t))

    def dx_psi(self, n, x, t):
        """``d psi_n/dx = i (conj(eps)' sqrt(n) psi_{n-1} + eps' sqrt(n+1) psi_{n+1})``."""
        x, t = _broadcast(x, t)
        s = self.solution
        out = 1j * s.eps_dot(t) * math.sqrt(n + 1) * self.psi(n + 1, x, t)
        if n > 0:
            out = out + 1j * np.conj(s.eps_dot(t)) * math.sqrt(n) * self.psi(n - 1, x, t)
        return out

    @property
    def lowering(self):
        """``a = eps d/dx - i eps' x / 2``."""
        s = self.solution
        return FirstOrderOperator(s.eps, lambda t: -0.5j * s.eps_dot(t))

    @property
    def raising(self):
        """``a+ = -conj(eps) d/dx + i conj(eps)' x / 2``."""
        s = self.solution
        return FirstOrderOperator(lambda t: -np.conj(s.eps(t)),
                                  lambda t: 0.5j * np.conj(s.eps_dot(t)))

    def apply_g(self, n, x, t):
        """``(a a+ + a+ a)/2`` applied to ``psi_n`` through the differential operators."""
        d = self.state(n).derivs(x, t, 2)
        a, ad = self.lowering, self.raising
        aad = a.apply(ad.apply(d, x, t), x, t)[0]
        ada = ad.apply(a.apply(d, x, t), x, t)[0]
        return 0.5 * (aad + ada)

    def potential(self, x, t):
        return self.solution.omega2(t) * np.asarray(x) ** 2

    def x_grid(self, t, nmax=10, dz=0.02):
        return x_grid(self.solution, t, nmax, dz)


def x_grid(solution, t, nmax=10, dz=0.02):
    """Symmetric quadrature grid covering ``|z| <= sqrt(2 (nmax + 40))`` at time ``t``."""
    zmax = math.sqrt(2.0 * (nmax + 40))
    npts = 2 * int(math.ceil(zmax / dz)) + 1
    return np.linspace(-zmax, zmax, npts) * math.sqrt(8.0 * float(solution.gamma(t)))


def inner(f, g, x):
    """``<f|g>`` on a uniform grid (trapezoid; spectrally accurate for decaying states)."""
    return trapezoid(np.conj(f) * g, x)


def norm2(f, x):
    return float(np.real(inner(f, f, x)))
