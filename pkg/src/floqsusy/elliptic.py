"""Weierstrass elliptic functions on a rectangular period lattice.

The functions are evaluated through the Jacobi theta function ``theta_1``
with nome ``q = exp(i*pi*tau)``, ``tau = omega3/omega1``.  Arguments are first
reduced into the centred fundamental cell with the quasi-periodicity of
``sigma`` and ``zeta``, so the theta series converges geometrically with a
number of terms fixed once per lattice.

Half-periods are ``omega1`` (real) and ``omega3 = i*|omega3|``; the full
periods are ``2*omega1`` and ``2*omega3``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PoleError",
    "ConvergenceError",
    "Lattice",
    "EllipticEnvelopeParams",
    "lattice_invariants",
    "wp",
    "wp_prime",
    "sigma",
    "log_sigma",
    "zeta_w",
    "solve_d",
    "epsilon_elliptic",
]


class PoleError(ValueError):
    """Raised when a function is evaluated on (or too close to) a lattice pole."""


class ConvergenceError(RuntimeError):
    """Raised when a series cannot reach the requested truncation tolerance."""


_MAX_THETA_TERMS = 60
_MAX_EISENSTEIN_TERMS = 2000


def _eisenstein(q2, power, tol):
    """Return sum_{n>=1} sigma_power(n) q2**n truncated at relative ``tol``."""
    total = 0.0
    for n in range(1, _MAX_EISENSTEIN_TERMS):
        divisors = [d for d in range(1, n + 1) if n % d == 0]
        term = sum(d**power for d in divisors) * q2**n
        total += term
        if abs(term) <= tol * max(abs(total), 1.0) and n > 2:
            return total
    raise ConvergenceError("Eisenstein series did not converge; lattice too elongated")


@dataclass(frozen=True)
class Lattice:
    """Rectangular lattice generated by the full periods ``real_period`` and
    ``i*imag_period``.

    Derived quantities (``g2``, ``g3``, ``eta1``, ``eta3``, ...) are computed on
    construction; instances are immutable and safe to share.
    """

    real_period: float
    imag_period: float
    tol: float = 1e-15
    g2: float = field(init=False, repr=False)
    g3: float = field(init=False, repr=False)
    eta1: float = field(init=False, repr=False)
    eta3: complex = field(init=False, repr=False)
    nterms: int = field(init=False, repr=False)
    _theta1p0: float = field(init=False, repr=False)

    def __post_init__(self):
        if not (self.real_period > 0 and self.imag_period > 0):
            raise ValueError(
                f"lattice periods must be positive, got ({self.real_period}, {self.imag_period})"
            )
        if not 0 < self.tol < 1e-3:
            raise ValueError("tol must lie in (0, 1e-3)")
        tau = self.imag_period / self.real_period
        # term n of the reduced theta series is bounded by exp(-pi*tau*(n^2 - 1/4))
        nterms = int(np.ceil(np.sqrt(np.log(1e3 / self.tol) / (np.pi * tau) + 0.25))) + 1
        if nterms > _MAX_THETA_TERMS:
            raise ConvergenceError(
                f"theta series needs {nterms} terms for tol={self.tol}; "
                "period ratio too small"
            )
        set_ = object.__setattr__
        set_(self, "nterms", nterms)
        w1 = self.omega1
        q = np.exp(-np.pi * tau)
        n = np.arange(nterms)
        c = (-1.0) ** n * q ** ((n + 0.5) ** 2)
        theta1p0 = 2.0 * np.sum(c * (2 * n + 1))
        theta1ppp0 = -2.0 * np.sum(c * (2 * n + 1) ** 3)
        eta1 = -np.pi**2 * theta1ppp0 / (12.0 * w1 * theta1p0)
        set_(self, "_theta1p0", theta1p0)
        set_(self, "eta1", float(eta1))
        # Legendre relation: eta1*omega3 - eta3*omega1 = i*pi/2
        set_(self, "eta3", (eta1 * self.omega3 - 0.5j * np.pi) / w1)
        q2 = np.exp(-2.0 * np.pi * tau)
        e4 = 1.0 + 240.0 * _eisenstein(q2, 3, self.tol)
        e6 = 1.0 - 504.0 * _eisenstein(q2, 5, self.tol)
        set_(self, "g2", float((np.pi / w1) ** 4 / 12.0 * e4))
        set_(self, "g3", float((np.pi / w1) ** 6 / 216.0 * e6))

    @classmethod
    def from_half_periods(cls, omega_r, omega_i_magnitude, tol=1e-15):
        """Build the lattice whose half-periods are ``omega_r`` and ``i*omega_i_magnitude``."""
        return cls(2.0 * omega_r, 2.0 * omega_i_magnitude, tol=tol)

    @property
    def omega1(self):
        return 0.5 * self.real_period

    @property
    def omega3(self):
        return 0.5j * self.imag_period

    @property
    def roots(self):
        """``(e1, e2, e3)``: values of wp at the half-periods omega1, omega1+omega3, omega3."""
        w1, w3 = self.omega1, self.omega3
        return tuple(float(np.real(wp(z, self))) for z in (w1, w1 + w3, w3))

    def reduce(self, z):
        """Split ``z`` as ``z0 + 2*m*omega1 + 2*n*omega3`` with ``z0`` in the centred cell."""
        z = np.asarray(z, dtype=complex)
        m = np.round(z.real / self.real_period)
        n = np.round(z.imag / self.imag_period)
        z0 = z - m * self.real_period - 1j * n * self.imag_period
        return z0, m, n

    def distance_to_lattice(self, z):
        z0, _, _ = self.reduce(z)
        return np.abs(z0)

    def with_tol(self, tol):
        return Lattice(self.real_period, self.imag_period, tol=tol)


def lattice_invariants(real_period, imag_period_magnitude, tol=1e-15):
    """Return ``(g2, g3)`` for the rectangular lattice with the given full periods.

    Uses the Eisenstein q-series, truncated once a term falls below ``tol``
    relative to the partial sum.
    """
    lat = Lattice(real_period, imag_period_magnitude, tol=tol)
    return lat.g2, lat.g3


def _theta1_derivs(v, lattice, order):
    """theta_1 and its first ``order`` derivatives with respect to ``v``."""
    tau = lattice.imag_period / lattice.real_period
    q = np.exp(-np.pi * tau)
    n = np.arange(lattice.nterms)
    c = (-1.0) ** n * q ** ((n + 0.5) ** 2)
    k = 2 * n + 1
    arg = np.multiply.outer(v, k)
    s, co = np.sin(arg), np.cos(arg)
    out = []
    # d^j/dv^j sin(k v) cycles through sin, cos, -sin, -cos
    cycle = (s, co, -s, -co)
    for j in range(order + 1):
        out.append(2.0 * np.sum(c * k**j * cycle[j % 4], axis=-1))
    return out


def _check_pole(z0, lattice, pole_tol):
    dist = np.abs(z0)
    if np.any(dist < pole_tol):
        raise PoleError(
            f"argument within {float(np.min(dist)):.3e} of a lattice point "
            f"(pole tolerance {pole_tol:.1e})"
        )


def _pole_tol(lattice):
    return 1e-9 * lattice.omega1


def zeta_w(z, lattice):
    """Weierstrass zeta function (quasi-periodic, ``zeta' = -wp``)."""
    z0, m, n = lattice.reduce(z)
    _check_pole(z0, lattice, _pole_tol(lattice))
    w1 = lattice.omega1
    th, th1 = _theta1_derivs(np.pi * z0 / (2 * w1), lattice, 1)
    val = lattice.eta1 * z0 / w1 + np.pi / (2 * w1) * th1 / th
    return val + 2 * m * lattice.eta1 + 2 * n * lattice.eta3


def wp(z, lattice):
    """Weierstrass elliptic function ``wp(z)``."""
    z0, _, _ = lattice.reduce(z)
    _check_pole(z0, lattice, _pole_tol(lattice))
    w1 = lattice.omega1
    th, th1, th2 = _theta1_derivs(np.pi * z0 / (2 * w1), lattice, 2)
    r1 = th1 / th
    return -lattice.eta1 / w1 - (np.pi / (2 * w1)) ** 2 * (th2 / th - r1**2)


def wp_prime(z, lattice):
    """Derivative ``wp'(z)``."""
    z0, _, _ = lattice.reduce(z)
    _check_pole(z0, lattice, _pole_tol(lattice))
    w1 = lattice.omega1
    th, th1, th2, th3 = _theta1_derivs(np.pi * z0 / (2 * w1), lattice, 3)
    r1 = th1 / th
    return -((np.pi / (2 * w1)) ** 3) * (th3 / th - 3 * r1 * th2 / th + 2 * r1**3)


def log_sigma(z, lattice):
    """A logarithm of ``sigma(z)``; the branch is arbitrary but ``exp`` of it is exact.

    Lattice points give ``-inf`` real part.
    """
    z0, m, n = lattice.reduce(z)
    w1 = lattice.omega1
    (th,) = _theta1_derivs(np.pi * z0 / (2 * w1), lattice, 0)
    with np.errstate(divide="ignore"):
        base = (
            np.log(2 * w1 / np.pi / lattice._theta1p0 + 0j)
            + lattice.eta1 * z0**2 / (2 * w1)
            + np.log(th + 0j)
        )
    half = m * lattice.omega1 + n * lattice.omega3
    eta_half = m * lattice.eta1 + n * lattice.eta3
    return base + 2 * eta_half * (z0 + half) + 1j * np.pi * (m + n + m * n)


def sigma(z, lattice):
    """Weierstrass sigma function (entire, simple zeros on the lattice)."""
    z0, m, n = lattice.reduce(z)
    w1 = lattice.omega1
    (th,) = _theta1_derivs(np.pi * z0 / (2 * w1), lattice, 0)
    base = 2 * w1 / np.pi * np.exp(lattice.eta1 * z0**2 / (2 * w1)) * th / lattice._theta1p0
    half = m * lattice.omega1 + n * lattice.omega3
    eta_half = m * lattice.eta1 + n * lattice.eta3
    sign = np.where(((m + n + m * n) % 2) == 0, 1.0, -1.0)
    return sign * base * np.exp(2 * eta_half * (z0 + half))


@dataclass(frozen=True)
class EllipticEnvelopeParams:
    """Parameters of the elliptic frequency model ``omega(t)^2 = omega0^2 - wp(t+omega3)/2``.

    ``d`` solves ``wp(d) = -4*omega0^2`` and ``zeta_d = zeta(d)``.
    """

    omega0: float
    d: complex
    zeta_d: complex


def _canonical(d, lattice):
    """Representative of ``d`` modulo the lattice in [0, 2w1) x [0, 2|w3|)."""
    re = np.mod(d.real, lattice.real_period)
    im = np.mod(d.imag, lattice.imag_period)
    # fold values that sit on the far edge back to 0
    if abs(re - lattice.real_period) < 1e-9:
        re = 0.0
    if abs(im - lattice.imag_period) < 1e-9:
        im = 0.0
    return complex(re, im)


def omega_squared(t, omega0, lattice):
    """``omega0^2 - wp(t + omega3)/2`` (complex; real on the real line)."""
    return omega0**2 - 0.5 * wp(np.asarray(t) + lattice.omega3, lattice)


def _raw_wronskian_sign(d, zeta_d, lattice):
    e, ed = epsilon_elliptic(0.0, EllipticEnvelopeParams(0.0, d, zeta_d), lattice, derivative=True)
    return float(np.imag(ed * np.conj(e)))


def solve_d(omega0, lattice, newton_tol=1e-12, grid=9, max_iter=60):
    """Solve ``wp(d) = -4*omega0**2`` by Newton iteration seeded on a cell grid.

    The two roots ``+-d`` (mod the lattice) give the complex-conjugate pair of
    Floquet solutions.  The returned root is the one whose raw envelope
    ``sigma(t+omega3+d)/sigma(t+omega3) exp(-t zeta(d))`` has positive
    Wronskian ``Im(eps' * conj(eps)) > 0``; the model must also give a real,
    positive ``omega(t)^2`` on the real line.
    """
    if omega0 < 0:
        raise ValueError("omega0 must be non-negative")
    target = -4.0 * omega0**2
    w1, w3 = lattice.omega1, lattice.omega3
    roots = []
    xs = (np.arange(grid) + 0.5) / grid * lattice.real_period
    ys = (np.arange(grid) + 0.5) / grid * lattice.imag_period
    for x in xs:
        for y in ys:
            d = complex(x, y)
            for _ in range(max_iter):
                try:
                    f = complex(wp(d, lattice)) - target
                    fp = complex(wp_prime(d, lattice))
                except PoleError:
                    break
                if fp == 0:
                    break
                step = f / fp
                d -= step
                if abs(step) < newton_tol * max(1.0, abs(d)):
                    break
            try:
                resid = abs(complex(wp(d, lattice)) - target)
            except PoleError:
                continue
            if resid < 1e-9 * max(1.0, abs(target)):
                c = _canonical(d, lattice)
                if all(abs(c - r) > 1e-7 for r in roots):
                    roots.append(c)
    if not roots:
        raise ConvergenceError(f"no root of wp(d) = {target:.6g} found in the fundamental cell")

    t = np.linspace(0.0, lattice.real_period, 257)[:-1]
    w2 = omega_squared(t, omega0, lattice)
    if np.max(np.abs(w2.imag)) > 1e-8 * max(1.0, np.max(np.abs(w2.real))) or np.min(w2.real) <= 0:
        raise ValueError("omega(t)^2 is not real and positive on the real line for this model")

    roots.sort(key=lambda r: (abs(r - (w1 + w3)), r.real, r.imag))
    for r in roots:
        zd = complex(zeta_w(r, lattice))
        if _raw_wronskian_sign(r, zd, lattice) > 0:
            return EllipticEnvelopeParams(float(omega0), r, zd)
    # only degenerate roots (d a half-period): fall back on the first one
    r = roots[0]
    return EllipticEnvelopeParams(float(omega0), r, complex(zeta_w(r, lattice)))


def epsilon_elliptic(t, params, lattice, derivative=False):
    """Unnormalised envelope ``sigma(t+omega3+d)/sigma(t+omega3) * exp(-t*zeta(d))``.

    With ``derivative=True`` returns ``(eps, deps/dt)``.  Scale the result with
    :func:`floqsusy.classical.normalize_wronskian` before use.
    """
    t = np.asarray(t, dtype=float)
    a = t + lattice.omega3 + params.d
    b = t + lattice.omega3
    if np.any(lattice.distance_to_lattice(b) < 1e-9):
        raise PoleError("envelope denominator vanishes on the requested times")
    eps = np.exp(log_sigma(a, lattice) - log_sigma(b, lattice) - t * params.zeta_d)
    if not derivative:
        return eps
    deps = eps * (zeta_w(a, lattice) - zeta_w(b, lattice) - params.zeta_d)
    return eps, deps
