"""Independent numerical oracles: finite-difference residuals, unitary propagation,
and propagation spectroscopy.

Nothing here uses the analytic derivatives of the state evaluators; the checks
only sample states and potentials on a grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lapack

__all__ = [
    "NumericalError",
    "Grid",
    "ResidualReport",
    "schrodinger_residual",
    "CrankNicolson",
    "propagate",
    "Spectrum",
    "spectroscopy",
]


class NumericalError(RuntimeError):
    """Propagation lost unitarity or a quadrature did not converge."""


@dataclass(frozen=True)
class Grid:
    """Symmetric spatial grid with Dirichlet truncation and ``t_steps`` per period."""

    x_min: float
    x_max: float
    nx: int = 2049
    t_steps: int = 4096
    boundary: str = "dirichlet"

    def __post_init__(self):
        if not math.isclose(self.x_max, -self.x_min, rel_tol=1e-14, abs_tol=1e-300):
            raise ValueError("grid must be symmetric: x_max = -x_min")
        if self.x_max <= 0:
            raise ValueError("x_max must be positive")
        if self.nx < 5 or self.nx % 2 == 0:
            raise ValueError("nx must be odd and >= 5")
        if self.t_steps < 4:
            raise ValueError("t_steps must be >= 4")
        if self.boundary != "dirichlet":
            raise ValueError("only dirichlet truncation is supported")

    @classmethod
    def default(cls, solution, width=12.0, nx=2049, t_steps=4096, samples=256):
        """``x_max = width * sqrt(8 gamma_max)``."""
        ts = np.linspace(0.0, solution.period, samples, endpoint=False)
        xm = width * math.sqrt(8.0 * float(np.max(solution.gamma(ts))))
        return cls(-xm, xm, nx, t_steps)

    @property
    def x(self):
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def dx(self):
        return (self.x_max - self.x_min) / (self.nx - 1)

    def halved(self):
        """Grid with twice the resolution in x and t."""
        return Grid(self.x_min, self.x_max, 2 * self.nx - 1, 2 * self.t_steps, self.boundary)

    def coarsened(self):
        return Grid(self.x_min, self.x_max, (self.nx + 1) // 2, self.t_steps // 2, self.boundary)


@dataclass
class ResidualReport:
    """Relative residuals of ``i psi_t = (-d^2/dx^2 + V) psi``.

    ``ratio`` is the coarse-to-fine residual ratio under step doubling
    (about 16 when the residual is fourth-order discretisation error, about 1
    when the state does not solve the equation).  ``discretization_limited``
    flags a residual above ``threshold`` that still shrinks with refinement,
    i.e. a grid that is too coarse.
    """

    sup_residual: float
    l2_residual: float
    grid: Grid
    state_id: str = ""
    potential_id: str = ""
    coarse_sup_residual: float = float("nan")
    ratio: float = float("nan")
    threshold: float = 1e-5
    times: tuple = field(default=())

    def __post_init__(self):
        if self.sup_residual < 0 or self.l2_residual < 0:
            raise ValueError("residuals are non-negative")

    @property
    def discretization_limited(self):
        return self.sup_residual > self.threshold and self.ratio > 4.0

    @property
    def passed(self):
        return self.sup_residual <= self.threshold


def _residual_once(state, potential, x, T, t_steps, times):
    dx = x[1] - x[0]
    h = T / t_steps
    sup = l2 = 0.0
    for t in times:
        f = state(x, t)
        ft = (-state(x, t + 2 * h) + 8 * state(x, t + h) - 8 * state(x, t - h) + state(x, t - 2 * h)) / (12 * h)
        fxx = (-f[4:] + 16 * f[3:-1] - 30 * f[2:-2] + 16 * f[1:-3] - f[:-4]) / (12 * dx**2)
        xi = x[2:-2]
        r = 1j * ft[2:-2] + fxx - potential(xi, t) * f[2:-2]
        scale_sup = np.max(np.abs(f))
        scale_l2 = math.sqrt(float(np.sum(np.abs(f) ** 2)))
        sup = max(sup, float(np.max(np.abs(r))) / scale_sup)
        l2 = max(l2, math.sqrt(float(np.sum(np.abs(r) ** 2))) / scale_l2)
    return sup, l2


def schrodinger_residual(state, potential, grid: Grid, times=None, threshold=1e-5, richardson=True,
                         state_id=None, potential_id=""):
    """Finite-difference residual with fourth-order stencils in x and t.

    The time step of the stencil is ``T / grid.t_steps``; the worst case over
    ``times`` (default four generic instants in the period) is reported.
    """
    T = state.period
    times = tuple(T * np.array([0.1, 0.35, 0.6, 0.85])) if times is None else tuple(times)
    x = grid.x
    sup, l2 = _residual_once(state, potential, x, T, grid.t_steps, times)
    coarse = ratio = float("nan")
    if richardson:
        c = grid.coarsened()
        coarse, _ = _residual_once(state, potential, c.x, T, c.t_steps, times)
        ratio = coarse / sup if sup > 0 else float("inf")
    return ResidualReport(sup, l2, grid, state_id or getattr(state, "label", ""), potential_id,
                          coarse, ratio, threshold, times)


class CrankNicolson:
    """Unitary propagator for ``i psi_t = (-d^2/dx^2 + V(x, t)) psi``.

    The Laplacian is the compact fourth-order (Numerov) operator ``B^-1 A``
    with ``A = (1, -2, 1)/dx^2`` and ``B = (1, 10, 1)/12``.  ``B`` and ``A``
    commute, so ``H = -B^-1 A + V`` is symmetric and the Cayley step
    ``(1 + i tau H/2)^-1 (1 - i tau H/2)`` is exactly unitary.  Each step
    solves ``(B + i tau/2 (-A + B V)) psi' = (B - i tau/2 (-A + B V)) psi``
    with ``V`` at the midpoint time.
    """

    def __init__(self, potential, grid: Grid, period, t0=0.0):
        self.grid = grid
        self.period = period
        self.t0 = t0
        self.tau = period / grid.t_steps
        x = grid.x
        tm = t0 + (np.arange(grid.t_steps) + 0.5) * self.tau
        self.V = np.asarray(potential(x[None, :], tm[:, None]), dtype=float)
        if not np.all(np.isfinite(self.V)):
            raise NumericalError("potential is not finite on the grid")
        self.inv_dx2 = 1.0 / grid.dx**2

    def _coeffs(self, k, sign):
        """Sub-, main and super-diagonal of ``B + sign * i tau/2 (-A + B V)``."""
        V = self.V[k]
        s = sign * 0.5j * self.tau
        d = 10.0 / 12.0 + s * (2.0 * self.inv_dx2 + V * (10.0 / 12.0))
        lo = 1.0 / 12.0 + s * (-self.inv_dx2 + V[:-1] / 12.0)
        up = 1.0 / 12.0 + s * (-self.inv_dx2 + V[1:] / 12.0)
        return lo, d, up

    def step(self, psi, k):
        lo, d, up = self._coeffs(k, -1.0)
        rhs = d * psi
        rhs[1:] += lo * psi[:-1]
        rhs[:-1] += up * psi[1:]
        lo, d, up = self._coeffs(k, 1.0)
        _, _, _, out, info = lapack.zgtsv(lo, d, up, rhs)
        if info != 0:
            raise NumericalError(f"tridiagonal solve failed (info={info})")
        return out

    def period_map(self, psi):
        psi = np.array(psi, dtype=complex)
        for k in range(self.grid.t_steps):
            psi = self.step(psi, k)
        return psi


def _l2(psi, dx):
    return math.sqrt(float(np.sum(np.abs(psi) ** 2)) * dx)


def _check_boundary(psi, tol=1e-12):
    peak = float(np.max(np.abs(psi)))
    edge = max(abs(psi[0]), abs(psi[-1]))
    if edge > tol * max(peak, 1.0):
        raise ValueError(f"state is not negligible at the grid boundary ({edge:.3g}); widen the grid")


def propagate(psi0, potential, grid: Grid, T, t0=0.0, n_periods=1, norm_tol=1e-8):
    """Samples at ``t0 + n_periods*T`` from samples ``psi0`` on ``grid.x`` at ``t0``.

    ``T`` is the period of ``potential``; ``grid.t_steps`` steps are taken per period.
    Raises :class:`NumericalError` when the norm drifts by more than ``norm_tol`` per period.
    """
    psi = np.asarray(psi0, dtype=complex)
    if psi.shape != (grid.nx,) or not np.all(np.isfinite(psi)):
        raise ValueError("initial samples must be finite and match the grid")
    _check_boundary(psi)
    cn = CrankNicolson(potential, grid, T, t0)
    n0 = _l2(psi, grid.dx)
    for _ in range(n_periods):
        psi = cn.period_map(psi)
        n1 = _l2(psi, grid.dx)
        if abs(n1 - n0) > norm_tol * n0:
            raise NumericalError(f"norm drift {abs(n1 - n0) / n0:.3g} over one period")
        n0 = n1
    return psi


@dataclass
class Spectrum:
    """Windowed Fourier transform of ``c_m = <p|U^m p>``.

    ``theta`` holds the phase per period in ``[0, 2 pi)``; a Floquet state with
    quasienergy ``E`` produces a peak at ``theta = E T mod 2 pi``.
    """

    theta: np.ndarray
    amplitude: np.ndarray
    overlaps: np.ndarray
    period: float
    n_periods: int

    @property
    def db(self):
        return 20.0 * np.log10(np.maximum(self.amplitude / self.amplitude.max(), 1e-300))

    @property
    def resolution(self):
        """Bin width ``2 pi/(n_periods T)`` in quasienergy."""
        return 2 * math.pi / (self.n_periods * self.period)

    def quasienergy_classes(self):
        return self.theta / self.period

    def level_at(self, energy, bins=2.0):
        """Strongest level (dB rel. the global maximum) within ``bins`` resolution
        widths of the class of ``energy``."""
        th = np.mod(energy * self.period, 2 * math.pi)
        dist = np.abs(np.angle(np.exp(1j * (self.theta - th))))
        mask = dist <= bins * 2 * math.pi / self.n_periods
        return float(np.max(self.db[mask]))

    def peaks(self, floor_db=-40.0):
        """Classes (phase per period) of local maxima above ``floor_db``."""
        a = self.db
        left, right = np.roll(a, 1), np.roll(a, -1)
        idx = np.where((a > left) & (a >= right) & (a > floor_db))[0]
        return self.theta[idx]


def spectroscopy(potential, probe, grid: Grid, n_periods, T, t0=0.0, resolution=None, pad=16,
                 norm_tol=1e-8):
    """Propagation spectroscopy with a Hann window.

    ``probe`` holds samples on ``grid.x`` at ``t0``.  With ``resolution``
    (in quasienergy units) the run is refused when ``n_periods`` cannot resolve it.
    """
    if resolution is not None:
        need = math.ceil(2 * math.pi / (T * resolution))
        if n_periods < need:
            raise ValueError(f"n_periods={n_periods} cannot resolve {resolution}; need at least {need}")
    psi = np.asarray(probe, dtype=complex)
    _check_boundary(psi)
    dx = grid.dx
    psi = psi / _l2(psi, dx)
    p0 = psi.copy()
    cn = CrankNicolson(potential, grid, T, t0)
    c = np.empty(n_periods + 1, dtype=complex)
    c[0] = 1.0
    for m in range(1, n_periods + 1):
        psi = cn.period_map(psi)
        nrm = _l2(psi, dx)
        if abs(nrm - 1.0) > norm_tol * m:
            raise NumericalError(f"norm drift {abs(nrm - 1.0):.3g} after {m} periods")
        c[m] = np.vdot(p0, psi) * dx
    w = np.hanning(n_periods + 3)[1:-1]
    nfft = pad * (n_periods + 1)
    # sum_m w_m c_m exp(+i theta m): peaks at theta = E T
    spec = np.fft.ifft(w * c, nfft) * nfft
    theta = 2 * math.pi * np.arange(nfft) / nfft
    return Spectrum(theta, np.abs(spec), c, T, n_periods)
