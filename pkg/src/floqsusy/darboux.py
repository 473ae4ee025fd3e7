"""Time-dependent Darboux (supersymmetry) transformations of the driven oscillator.

Two constructions are provided:

* :class:`CreationTransform` uses the growing solution ``u_k`` (k even) and adds
  a square-integrable level at quasienergy ``-(k + 1/2) delta``.
* :class:`DeletionTransform` chains ``u = psi_k`` and ``u~ = L psi_{k+1}`` and
  removes the levels ``k`` and ``k+1``.

A transformation with function ``u`` maps solutions of ``h0`` to solutions of
``h1 = h0 - d^2/dx^2 ln|u|^2`` through ``L = L1(t) (-d/dx + u_x/u)``.
"""

from __future__ import annotations

import math
from math import comb

import numpy as np
from scipy.integrate import quad, trapezoid

from . import _gauss
from .elliptic import PoleError
from .polynomials import J_poly, hermite_poly, q_eval
from .states import OscillatorStates, StateEvaluator, _broadcast

__all__ = [
    "UnphysicalSolution",
    "LTransformed",
    "LAdjointTransformed",
    "CreatedState",
    "PhiK2State",
    "DeletedState",
    "DarbouxTransform",
    "CreationTransform",
    "DeletionTransform",
    "L1_from_quadrature",
    "L_apply",
    "u_unphysical",
    "potential_created",
    "potential_deleted",
    "phi_k2",
    "created_state",
    "delete_chain_states",
    "reality_defect",
]


class UnphysicalSolution(StateEvaluator):
    """Growing solution ``u_k = gamma^(-1/4) (eps/conj eps)^(k/2+1/4) H_k(iz) exp((i gamma' + 1/2) z^2)``.

    It solves the ``h0`` equation and is nodeless for even ``k``.
    """

    def __init__(self, solution, k):
        if k < 0:
            raise ValueError("k must be non-negative")
        super().__init__(solution, -k - 1, f"u_{k}")
        self.k = k

    def amplitude(self, t):
        s = self.solution
        return np.exp(2j * (self.k / 2 + 0.25) * s.arg_eps(t)) * s.gamma(t) ** -0.25

    def derivs(self, x, t, m):
        x, t = _broadcast(x, t)
        s = self.solution
        scale = np.sqrt(8.0 * s.gamma(t))
        z = x / scale
        kappa = 1j * s.gamma_dot(t) + 0.5
        # d^j/dz^j H_k(iz) = i^j H_k^(j)(iz)
        hd = _gauss.hermite_derivs(self.k, 1j * z, m)
        pder = [(1j) ** j * h for j, h in enumerate(hd)]
        vals = _gauss.leibniz(pder, z, kappa, m)
        base = self.amplitude(t) * np.exp(kappa * z**2)
        return [base * v / scale**j for j, v in enumerate(vals)]


def reality_defect(u, x, t):
    """``d^3/dx^3 ln(u/conj u) = 2i Im(w'')`` with ``w = u_x/u``; zero for admissible ``u``."""
    w = _gauss.log_derivs(u.derivs(x, t, 3))
    return 2j * np.imag(w[2])


def _log_derivs_of(u, x, t, m):
    return _gauss.log_derivs(u.derivs(x, t, m + 1))


def L1_from_quadrature(u, z0=1 / math.pi):
    """``L1(t) = exp(2 int_0^t Im(d^2/dx^2 ln u) ds)`` with ``L1(0) = 1``.

    The integrand is x-independent for admissible ``u``; it is sampled at the
    moving point ``x = z0 * sqrt(8 gamma(t))`` (``z0`` is not a Hermite root).
    """
    sol = u.solution

    def rate(s):
        x = z0 * math.sqrt(8.0 * float(sol.gamma(s)))
        return 2.0 * float(np.imag(_log_derivs_of(u, x, s, 1)[1]))

    cache = {}

    def one(tv):
        if tv not in cache:
            cache[tv] = math.exp(quad(rate, 0.0, tv, epsabs=1e-13, epsrel=1e-12, limit=200)[0])
        return cache[tv]

    def L1(t):
        t = np.asarray(t, dtype=float)
        uniq, inv = np.unique(t, return_inverse=True)
        return np.array([one(float(v)) for v in uniq])[inv].reshape(t.shape)

    return L1


class LTransformed(StateEvaluator):
    """``scale * L1(t) * (-f_x + (u_x/u) f)`` for a base state ``f``."""

    def __init__(self, base, u, L1, scale=1.0, label=None):
        super().__init__(base.solution, base.index, label or f"L[{base.label}]")
        self.base, self.u, self.L1, self.scale = base, u, L1, scale

    def derivs(self, x, t, m):
        x, t = _broadcast(x, t)
        f = self.base.derivs(x, t, m + 1)
        ud = self.u.derivs(x, t, m + 1)
        if np.any(ud[0] == 0):
            raise PoleError(f"transformation function {self.u.label} vanishes at a requested point")
        w = _gauss.log_derivs(ud)
        pre = self.scale * self.L1(t)
        out = []
        for j in range(m + 1):
            acc = -f[j + 1] + sum(comb(j, i) * w[i] * f[j - i] for i in range(j + 1))
            out.append(pre * acc)
        return out


class LAdjointTransformed(StateEvaluator):
    """``L+ f = L1(t) * (f_x + conj(u_x/u) f)``: maps ``h1`` solutions back to ``h0``."""

    def __init__(self, base, u, L1, label=None):
        super().__init__(base.solution, base.index, label or f"L+[{base.label}]")
        self.base, self.u, self.L1 = base, u, L1

    def derivs(self, x, t, m):
        x, t = _broadcast(x, t)
        f = self.base.derivs(x, t, m + 1)
        w = [np.conj(v) for v in _log_derivs_of(self.u, x, t, m)]
        pre = self.L1(t)
        return [pre * (f[j + 1] + sum(comb(j, i) * w[i] * f[j - i] for i in range(j + 1)))
                for j in range(m + 1)]


def L_apply(u, L1, state, scale=1.0):
    """Apply ``L = L1 (-d/dx + u_x/u)`` to ``state``; ``L1=None`` integrates it by quadrature.

    Evaluating the result where ``u`` vanishes raises :class:`PoleError`.
    """
    return LTransformed(state, u, L1 if L1 is not None else L1_from_quadrature(u), scale)


class CreatedState(StateEvaluator):
    """Normalised ``v = 1/(L1 conj(u_k))``, the level created at ``-(k+1/2) delta``."""

    def __init__(self, u, L1, norm_t=0.0):
        super().__init__(u.solution, u.index, f"v_{u.k}")
        self.u, self.L1 = u, L1
        self.scale = 1.0
        x = _wide_grid(u.solution, norm_t, u.k)
        self.scale = 1.0 / math.sqrt(float(trapezoid(np.abs(self(x, norm_t)) ** 2, x)))

    def derivs(self, x, t, m):
        x, t = _broadcast(x, t)
        ud = self.u.derivs(x, t, m)
        wbar = [-np.conj(v) for v in _gauss.log_derivs(ud)]
        v = [self.scale / (self.L1(t) * np.conj(ud[0]))]
        # v'/v = -conj(u_x/u)
        for j in range(m):
            v.append(sum(comb(j, i) * wbar[i] * v[j - i] for i in range(j + 1)))
        return v


class PhiK2State(StateEvaluator):
    """Closed form of the transformed state for ``k = 2``::

        phi_n = (n+3)^(-1/2) [sqrt(n+1) (eps/conj eps)^(1/2) psi_{n+1} + sqrt(2) z/(z^2+1/2) psi_n]
    """

    def __init__(self, states: OscillatorStates, n):
        super().__init__(states.solution, n, f"phi_{n}")
        self.n = n
        self.psi_n = states.state(n)
        self.psi_n1 = states.state(n + 1)

    def derivs(self, x, t, m):
        x, t = _broadcast(x, t)
        s = self.solution
        scale = np.sqrt(8.0 * s.gamma(t))
        z = x / scale
        # sqrt(2) z/(z^2 + 1/2) = (1/sqrt 2) d/dz ln(z^2 + 1/2)
        poly = [z**2 + 0.5, 2 * z, 2 * np.ones_like(z)] + [np.zeros_like(z)] * max(0, m - 1)
        w = _gauss.log_derivs(poly[: m + 2])
        sx = [w[j] / math.sqrt(2.0) / scale**j for j in range(m + 1)]
        a = self.psi_n.derivs(x, t, m)
        b = self.psi_n1.derivs(x, t, m)
        ph = math.sqrt(self.n + 1) * np.exp(1j * s.arg_eps(t))
        c = 1.0 / math.sqrt(self.n + 3)
        return [c * (ph * b[j] + sum(comb(j, i) * sx[i] * a[j - i] for i in range(j + 1)))
                for j in range(m + 1)]


class DeletedState(StateEvaluator):
    """State ``n`` of ``h2^(k)`` (levels k, k+1 removed).

    ``method="wronskian"`` evaluates the pole-free form
    ``C a_n(t) exp((i gamma' - 1/2) z^2) W(H_k, H_{k+1}, H_n)(z) / J_k(z)``;
    ``method="compose"`` applies the two first-order operators in turn and
    falls back on the Wronskian form within ``zero_band`` (in z) of the zeros
    of the intermediate function ``psi_k``.
    """

    def __init__(self, states: OscillatorStates, k, n, method="wronskian", zero_band=1e-6):
        if k < 0 or n < 0:
            raise ValueError("k and n must be non-negative")
        if n in (k, k + 1):
            raise ValueError(f"level {n} is deleted by the k={k} chain")
        if method not in ("wronskian", "compose"):
            raise ValueError(f"unknown method {method!r}")
        super().__init__(states.solution, n, f"chi^{k}_{n}")
        self.k, self.n, self.method, self.zero_band = k, n, method, zero_band
        self.psi_n = states.state(n)
        hk, hk1, hn = hermite_poly(k), hermite_poly(k + 1), hermite_poly(n)
        rows = [[hk, hk1, hn], [hk.deriv(), hk1.deriv(), hn.deriv()],
                [hk.deriv(2), hk1.deriv(2), hn.deriv(2)]]
        self.numerator = _det3(rows)
        self.denominator = J_poly(k)
        self.zeros_k = np.sort(np.real(np.polynomial.hermite.hermroots([0] * k + [1]))) if k else np.array([])
        self._wscale = 1.0
        x = _wide_grid(states.solution, 0.0, max(n, k + 1))
        self._wscale = 1.0 / math.sqrt(float(trapezoid(np.abs(self._wronskian_form(x, 0.0, 0)[0]) ** 2, x)))
        if method == "compose":
            sol = states.solution
            self._L1 = lambda t: np.sqrt(sol.gamma(t) / sol.gamma(0.0))
            first = LTransformed(states.state(n), states.state(k), self._L1)
            self._u2 = LTransformed(states.state(k + 1), states.state(k), self._L1)
            self._composed = LTransformed(first, self._u2, L1_from_quadrature(self._u2))
            xs = x[self._off_zeros(x / math.sqrt(8.0 * float(sol.gamma(0.0))))]
            c = math.sqrt(float(trapezoid(np.abs(self._composed(xs, 0.0)) ** 2, xs)))
            self._cscale = 1.0 / c

    def _off_zeros(self, z):
        if not len(self.zeros_k):
            return np.ones(np.shape(z), dtype=bool)
        d = np.min(np.abs(np.asarray(z)[..., None] - self.zeros_k), axis=-1)
        return d >= self.zero_band

    def _wronskian_form(self, x, t, m):
        x, t = _broadcast(x, t)
        s = self.solution
        scale = np.sqrt(8.0 * s.gamma(t))
        z = x / scale
        kappa = 1j * s.gamma_dot(t) - 0.5
        num = [self.numerator.deriv(j)(z) for j in range(m + 1)]
        den = [self.denominator.deriv(j)(z) for j in range(m + 1)]
        r = []
        for j in range(m + 1):
            acc = num[j] - sum(comb(j, i) * r[i] * den[j - i] for i in range(j))
            r.append(acc / den[0])
        vals = _gauss.leibniz(r, z, kappa, m)
        base = self._wscale * self.psi_n.amplitude(t) * np.exp(kappa * z**2)
        return [base * v / scale**j for j, v in enumerate(vals)]

    def derivs(self, x, t, m):
        if self.method == "wronskian":
            return self._wronskian_form(x, t, m)
        x, t = _broadcast(x, t)
        out = self._wronskian_form(x, t, m)
        z = x / np.sqrt(8.0 * self.solution.gamma(t))
        ok = self._off_zeros(z)
        if np.any(ok):
            comp = self._composed.derivs(x[ok], t[ok], m)
            for j in range(m + 1):
                out[j][ok] = self._cscale * comp[j]
        return out


def _det3(r):
    return (r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
            - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]))


def _wide_grid(solution, t, nmax, dz=0.01):
    zmax = math.sqrt(2.0 * (nmax + 40))
    return np.linspace(-zmax, zmax, 2 * int(zmax / dz) + 1) * math.sqrt(8.0 * float(solution.gamma(t)))


def potential_created(l, x, t, solution):
    """``A1^(2l)``, with ``V1^(2l) = omega^2 x^2 - A1^(2l)``::

        A1 = [1 + 4l(2l-1) q_{2l-2}/q_{2l} - 8 l^2 (q_{2l-1}/q_{2l})^2] / (4 gamma)
    """
    if l < 0:
        raise ValueError("l must be non-negative")
    x, t = _broadcast(x, t)
    g = solution.gamma(t)
    z = x / np.sqrt(8.0 * g)
    bracket = np.ones_like(z)
    if l > 0:
        k = 2 * l
        qk = q_eval(k, z)
        bracket = bracket + 4 * l * (2 * l - 1) * q_eval(k - 2, z) / qk - 8 * l**2 * (q_eval(k - 1, z) / qk) ** 2
    return bracket / (4.0 * g)


def potential_deleted(k, x, t, solution):
    """``A2^(k) = [J_k''/J_k - (J_k'/J_k)^2 - 2] / (4 gamma)`` (derivatives in z)."""
    if k < 0:
        raise ValueError("k must be non-negative")
    x, t = _broadcast(x, t)
    g = solution.gamma(t)
    z = x / np.sqrt(8.0 * g)
    J = J_poly(k)
    j0, j1, j2 = J(z), J.deriv()(z), J.deriv(2)(z)
    return (j2 / j0 - (j1 / j0) ** 2 - 2.0) / (4.0 * g)


class DarbouxTransform:
    """A transformation: its function ``u``, factor ``L1``, potential difference ``A``.

    ``h1 = -d^2/dx^2 + V`` with ``V = omega^2 x^2 - A``.
    """

    mode = "generic"
    new_level = None

    def __init__(self, states: OscillatorStates, u, L1=None):
        self.states = states
        self.solution = states.solution
        self.u = u
        self.L1 = L1 if L1 is not None else L1_from_quadrature(u)

    def A(self, x, t):
        """``d^2/dx^2 ln|u|^2 = 2 Re(w')``."""
        x, t = _broadcast(x, t)
        return 2.0 * np.real(_log_derivs_of(self.u, x, t, 1)[1])

    def V(self, x, t):
        x, t = _broadcast(x, t)
        return self.solution.omega2(t) * x**2 - self.A(x, t)

    def L(self, state, scale=1.0):
        return LTransformed(state, self.u, self.L1, scale)

    def L_adjoint(self, state):
        return LAdjointTransformed(state, self.u, self.L1)


class CreationTransform(DarbouxTransform):
    """Transformation with ``u_k`` (k even), ``L1 = sqrt(gamma)``.

    ``u_k`` is a ``g``-eigenfunction with eigenvalue ``-(2k+1)/8``, so
    ``L+ L = g + shift`` with ``shift = (2k+1)/8`` (5/8 for k = 2).
    """

    mode = "create"

    def __init__(self, states: OscillatorStates, k=2):
        if k < 0 or k % 2:
            raise ValueError("creation needs an even k (nodeless transformation function)")
        sol = states.solution
        super().__init__(states, UnphysicalSolution(sol, k), lambda t: np.sqrt(sol.gamma(t)))
        self.k = k
        self.shift = (2 * k + 1) / 8

    @property
    def new_level(self):
        return -self.solution.delta * (self.k + 0.5)

    def A(self, x, t):
        return potential_created(self.k // 2, x, t, self.solution)

    def norm_factor(self, n):
        """``M_n = <psi_n|L+ L|psi_n> = (2n+1)/8 + shift``."""
        return (2 * n + 1) / 8 + self.shift

    def state(self, n):
        """Normalised ``L psi_n / sqrt(M_n)``."""
        return LTransformed(self.states.state(n), self.u, self.L1,
                            1.0 / math.sqrt(self.norm_factor(n)), label=f"Lpsi_{n}")

    def closed_form(self, n):
        if self.k != 2:
            raise NotImplementedError("closed-form transformed states are available for k = 2")
        return PhiK2State(self.states, n)

    def created_state(self):
        return CreatedState(self.u, self.L1)


class DeletionTransform(DarbouxTransform):
    """Two-step chain ``u = psi_k`` then ``u~ = L psi_{k+1}``; removes levels k, k+1."""

    mode = "delete"

    def __init__(self, states: OscillatorStates, k):
        if k < 0:
            raise ValueError("k must be non-negative")
        sol = states.solution
        super().__init__(states, states.state(k), lambda t: np.sqrt(sol.gamma(t) / sol.gamma(0.0)))
        self.k = k
        self.deleted_levels = (k, k + 1)

    def A(self, x, t):
        return potential_deleted(self.k, x, t, self.solution)

    def state(self, n, method="wronskian"):
        return DeletedState(self.states, self.k, n, method=method)


def u_unphysical(k, x, t, states):
    return UnphysicalSolution(states.solution, k)(x, t)


def phi_k2(n, x, t, states):
    return PhiK2State(states, n)(x, t)


def created_state(k, states):
    """``(evaluator, quasienergy)`` of the created level for even ``k``."""
    tr = CreationTransform(states, k)
    return tr.created_state(), tr.new_level


def delete_chain_states(k, n, x, t, states, method="compose"):
    return DeletedState(states, k, n, method=method)(x, t)
