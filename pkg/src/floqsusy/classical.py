"""Classical envelope equation ``eps'' + 4 omega(t)^2 eps = 0``.

Builds the complex Floquet solution ``eps`` normalised to the Wronskian
``eps' conj(eps) - eps conj(eps)' = i/2``, its continuous phase, the
quasienergy spacing ``delta`` and the stability class of the monodromy.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from . import elliptic as ell

__all__ = [
    "Stability",
    "UnstableError",
    "DegenerateFloquetWarning",
    "FrequencyModel",
    "PhaseTracker",
    "ClassicalSolution",
    "integrate_classical",
    "classify_stability",
    "floquet_exponent",
    "normalize_wronskian",
    "solve_classical",
]

STABILITY_BAND = 1e-9


class Stability(str, enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    MIXED = "mixed"


class UnstableError(ValueError):
    """Quasienergies are undefined: the envelope equation has no bounded complex pair."""


class DegenerateFloquetWarning(UserWarning):
    pass


@dataclass(frozen=True)
class FrequencyModel:
    """A periodic squared frequency ``omega(t)^2``.

    Use the constructors :meth:`constant`, :meth:`elliptic` and :meth:`user`.
    """

    kind: str
    period: float
    omega0: float | None = None
    lattice: ell.Lattice | None = None
    envelope: ell.EllipticEnvelopeParams | None = None
    func: Callable | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in ("constant", "elliptic", "user"):
            raise ValueError(f"unknown frequency model kind {self.kind!r}")
        if not self.period > 0:
            raise ValueError("period must be positive")

    @classmethod
    def constant(cls, omega0, period):
        if not omega0 > 0:
            raise ValueError("omega0 must be positive")
        return cls("constant", float(period), omega0=float(omega0))

    @classmethod
    def elliptic(cls, omega0, lattice):
        """``omega(t)^2 = omega0^2 - wp(t + omega3)/2``, period ``lattice.real_period``."""
        params = ell.solve_d(omega0, lattice)
        return cls("elliptic", lattice.real_period, omega0=float(omega0),
                   lattice=lattice, envelope=params)

    @classmethod
    def user(cls, omega2, period):
        """Arbitrary callable ``t -> omega(t)^2`` (vectorised) with period ``period``."""
        return cls("user", float(period), func=omega2)

    def omega2(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "constant":
            return np.full(t.shape, self.omega0**2)
        if self.kind == "elliptic":
            return np.real(ell.omega_squared(t, self.omega0, self.lattice))
        return np.asarray(self.func(t), dtype=float)

    def check_periodic(self, samples=64, tol=1e-9):
        t = np.linspace(0.0, self.period, samples, endpoint=False)
        a, b = self.omega2(t), self.omega2(t + self.period)
        return bool(np.max(np.abs(a - b)) <= tol * max(1.0, np.max(np.abs(a))))


def _fundamental_system(model, tol, dense=False):
    """Integrate the real fundamental matrix over one period."""

    def rhs(t, y):
        w2 = 4.0 * model.omega2(t)
        return [y[1], -w2 * y[0], y[3], -w2 * y[2]]

    sol = solve_ivp(rhs, (0.0, model.period), [1.0, 0.0, 0.0, 1.0], method="DOP853",
                    rtol=tol, atol=tol * 1e-2, dense_output=dense)
    if not sol.success:
        raise RuntimeError(f"envelope integration failed: {sol.message}")
    return sol


def integrate_classical(model, tol=1e-12):
    """Monodromy matrix of ``(eps, eps')`` over one period.

    Column j is the state at ``t = T`` of the solution started from the j-th
    unit vector, so ``det = 1`` up to the integrator tolerance.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    y = _fundamental_system(model, tol).y[:, -1]
    return np.array([[y[0], y[2]], [y[1], y[3]]])


def classify_stability(monodromy, band=STABILITY_BAND):
    tr = abs(float(np.trace(monodromy)))
    if abs(tr - 2.0) < band:
        return Stability.MIXED
    return Stability.STABLE if tr < 2.0 else Stability.UNSTABLE


def _floquet_eigvec(monodromy):
    """Eigenpair whose solution has positive Wronskian ``Im(eps' conj(eps)) > 0``."""
    vals, vecs = np.linalg.eig(np.asarray(monodromy, dtype=complex))
    for lam, v in zip(vals, vecs.T):
        if np.imag(v[1] * np.conj(v[0])) > 0:
            return lam, v
    raise UnstableError("monodromy has no complex eigenvector with positive Wronskian")


def floquet_exponent(monodromy, period):
    """Quasienergy spacing class ``delta`` in ``[0, 2*pi/T)``.

    ``exp(i*delta*T)`` is the multiplier of the Floquet solution that carries the
    ``+i/2`` Wronskian.  Only the class modulo ``2*pi/T`` is available from the
    monodromy; :attr:`ClassicalSolution.delta` carries the continuous value.
    """
    stab = classify_stability(monodromy)
    if stab is Stability.UNSTABLE:
        raise UnstableError(f"|trace| = {abs(np.trace(monodromy)):.6g} > 2: no real delta")
    if stab is Stability.MIXED:
        warnings.warn("monodromy at the stability boundary; delta is degenerate",
                      DegenerateFloquetWarning, stacklevel=2)
        lam = np.sign(np.trace(monodromy)) or 1.0
        return float(np.mod(np.angle(lam), 2 * np.pi) / period)
    lam, _ = _floquet_eigvec(monodromy)
    return float(np.mod(np.angle(lam), 2 * np.pi) / period)


class PhaseTracker:
    """Continuous branch of ``arg eps(t)`` for all real ``t``.

    A table of unwrapped phases over one period selects the branch; the value
    itself always comes from ``angle(eps(t))``, so ``exp(i*arg)*|eps| == eps``
    to rounding.  Outside ``[0, T)`` the Floquet shift ``delta*T`` per period
    is added.
    """

    def __init__(self, eps, period, samples=2000):
        self.period = float(period)
        self._eps = eps
        self._t = np.linspace(0.0, self.period, samples + 1)
        raw = np.angle(eps(self._t))
        steps = np.diff(np.unwrap(raw))
        if np.max(np.abs(steps)) > 0.5 * np.pi:
            raise ValueError("phase table too coarse to resolve arg(eps); raise samples")
        self._arg = raw[0] + np.concatenate([[0.0], np.cumsum(steps)])
        self.advance = float(self._arg[-1] - self._arg[0])

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        m = np.floor(t / self.period)
        t0 = t - m * self.period
        guess = np.interp(t0, self._t, self._arg)
        raw = np.angle(self._eps(t0))
        branch = guess + np.angle(np.exp(1j * (raw - guess)))
        return branch + m * self.advance


class ClassicalSolution:
    """Wronskian-normalised complex envelope and derived quantities.

    Parameters
    ----------
    eps, eps_dot : callable
        Vectorised ``t -> complex`` (already normalised so that the Wronskian is i/2).
    model : FrequencyModel
    """

    def __init__(self, eps, eps_dot, model, phase_samples=2000):
        self.model = model
        self.period = model.period
        self._eps = eps
        self._eps_dot = eps_dot
        self.phase = PhaseTracker(eps, self.period, phase_samples)
        # d(arg eps)/dt = 1/(4 gamma) > 0, so the advance over a period is the rotation number
        self.delta = self.phase.advance / self.period
        e0, eT = eps(0.0), eps(self.period)
        self.multiplier = complex(eT / e0)
        mod = abs(self.multiplier)
        if abs(mod - 1.0) > 1e-7:
            raise UnstableError(f"Floquet multiplier modulus {mod:.6g} != 1")
        self.stability = Stability.STABLE

    @property
    def delta_class(self):
        """``delta`` reduced into ``[0, 2*pi/T)``."""
        return float(np.mod(self.delta, 2 * np.pi / self.period))

    def eps(self, t):
        return self._eps(np.asarray(t, dtype=float))

    def eps_dot(self, t):
        return self._eps_dot(np.asarray(t, dtype=float))

    def eps_ddot(self, t):
        return -4.0 * self.model.omega2(t) * self.eps(t)

    def arg_eps(self, t):
        return self.phase(t)

    def gamma(self, t):
        return np.abs(self.eps(t)) ** 2

    def gamma_dot(self, t):
        return 2.0 * np.real(self.eps_dot(t) * np.conj(self.eps(t)))

    def gamma_ddot(self, t):
        e, ed = self.eps(t), self.eps_dot(t)
        return 2.0 * np.abs(ed) ** 2 - 8.0 * self.model.omega2(t) * np.abs(e) ** 2

    def log_gamma_ddot(self, t):
        """Second time derivative of ``ln gamma`` (analytic)."""
        g = self.gamma(t)
        return self.gamma_ddot(t) / g - (self.gamma_dot(t) / g) ** 2

    def wronskian(self, t):
        e, ed = self.eps(t), self.eps_dot(t)
        return ed * np.conj(e) - e * np.conj(ed)

    def omega2(self, t):
        return self.model.omega2(t)


def normalize_wronskian(eps_raw, eps_dot_raw, model, phase_samples=2000):
    """Scale a raw complex envelope so its Wronskian equals ``i/2``.

    A raw Wronskian on the negative imaginary axis is handled by swapping to
    the complex conjugate solution.
    """
    e0, ed0 = complex(eps_raw(0.0)), complex(eps_dot_raw(0.0))
    w = ed0 * np.conj(e0) - e0 * np.conj(ed0)
    if abs(w) < 1e-14 * max(1.0, abs(e0) * abs(ed0)):
        raise ValueError("Wronskian of (eps, conj eps) vanishes: not a complex Floquet pair")
    im = w.imag
    c = 1.0 / np.sqrt(2.0 * abs(im))
    if im > 0:
        eps = lambda t: c * eps_raw(t)  # noqa: E731
        eps_dot = lambda t: c * eps_dot_raw(t)  # noqa: E731
    else:
        eps = lambda t: c * np.conj(eps_raw(t))  # noqa: E731
        eps_dot = lambda t: c * np.conj(eps_dot_raw(t))  # noqa: E731
    return ClassicalSolution(eps, eps_dot, model, phase_samples)


def _ode_solution(model, tol):
    sol = _fundamental_system(model, tol, dense=True)
    y = sol.y[:, -1]
    mono = np.array([[y[0], y[2]], [y[1], y[3]]])
    stab = classify_stability(mono)
    if stab is not Stability.STABLE:
        raise UnstableError(
            f"envelope equation is {stab.value} (|trace| = {abs(np.trace(mono)):.6g})"
        )
    lam, (a, b) = _floquet_eigvec(mono)
    lam = lam / abs(lam)
    T = model.period
    dense = sol.sol

    def _state(t):
        t = np.asarray(t, dtype=float)
        m = np.floor(t / T)
        t0 = t - m * T
        yy = dense(t0.ravel())
        e = a * yy[0] + b * yy[2]
        ed = a * yy[1] + b * yy[3]
        f = lam ** m.ravel()
        return (e * f).reshape(t.shape), (ed * f).reshape(t.shape)

    return normalize_wronskian(lambda t: _state(t)[0], lambda t: _state(t)[1], model)


def solve_classical(model, method="auto", tol=1e-12):
    """Build the :class:`ClassicalSolution` for ``model``.

    ``method="auto"`` uses the closed form for the constant and elliptic
    models and adaptive integration otherwise; ``"ode"`` forces integration.
    """
    if method not in ("auto", "ode"):
        raise ValueError(f"unknown method {method!r}")
    if method == "ode" or model.kind == "user":
        return _ode_solution(model, tol)
    if model.kind == "constant":
        w0 = model.omega0
        return normalize_wronskian(
            lambda t: np.exp(2j * w0 * np.asarray(t, dtype=float)),
            lambda t: 2j * w0 * np.exp(2j * w0 * np.asarray(t, dtype=float)),
            model,
        )
    lat, par = model.lattice, model.envelope
    return normalize_wronskian(
        lambda t: ell.epsilon_elliptic(t, par, lat),
        lambda t: ell.epsilon_elliptic(t, par, lat, derivative=True)[1],
        model,
    )
