"""Exact-coefficient polynomial families used by the Darboux transformations.

``J_k(z) = sum_j k!/(2^j j!) H_j(z)^2`` and ``q_k(z) = (-i)^k 2^(-k/2) H_k(iz)``.
``q_k`` is stored as the integer polynomial ``Q_k(y)`` with ``q_k(z) = Q_k(sqrt(2) z)``
and ``Q_{k+1} = y Q_k + k Q_{k-1}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

__all__ = ["ExactPolynomial", "hermite_poly", "J_poly", "J_poly_direct", "Q_poly", "q_eval",
           "PolynomialFamily"]


@dataclass(frozen=True)
class ExactPolynomial:
    """Polynomial with ``Fraction`` coefficients, lowest degree first."""

    coeffs: tuple

    def __post_init__(self):
        c = [Fraction(v) for v in self.coeffs]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c) if c else (Fraction(0),))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return ExactPolynomial(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-1) * _as_poly(other)

    def __mul__(self, other):
        if not isinstance(other, ExactPolynomial):
            return ExactPolynomial(tuple(c * Fraction(other) for c in self.coeffs))
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return ExactPolynomial(tuple(out))

    __rmul__ = __mul__

    def deriv(self, m=1):
        c = list(self.coeffs)
        for _ in range(m):
            c = [k * c[k] for k in range(1, len(c))] or [Fraction(0)]
        return ExactPolynomial(tuple(c))

    def __call__(self, z):
        """Horner evaluation in floating point (complex input allowed)."""
        z = np.asarray(z)
        acc = np.zeros_like(z, dtype=np.result_type(z, float))
        for c in reversed(self.coeffs):
            acc = acc * z + float(c)
        return acc

    def is_even(self):
        return all(c == 0 for c in self.coeffs[1::2])

    def certify_positive(self):
        """True when only even powers appear, all coefficients are >= 0 and the
        constant term is positive, which proves ``p(z) >= p(0) > 0`` on the real line."""
        return self.is_even() and self.coeffs[0] > 0 and all(c >= 0 for c in self.coeffs)


def _as_poly(p):
    return p if isinstance(p, ExactPolynomial) else ExactPolynomial((p,))


Z = ExactPolynomial((0, 1))


@lru_cache(maxsize=None)
def hermite_poly(n) -> ExactPolynomial:
    """Physicists' Hermite polynomial with integer coefficients."""
    if n == 0:
        return ExactPolynomial((1,))
    if n == 1:
        return ExactPolynomial((0, 2))
    return 2 * Z * hermite_poly(n - 1) - 2 * (n - 1) * hermite_poly(n - 2)


@lru_cache(maxsize=None)
def J_poly(k) -> ExactPolynomial:
    """``J_k`` by ``J_k = k J_{k-1} + 2^-k H_k^2``, ``J_0 = 1``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return ExactPolynomial((1,))
    h = hermite_poly(k)
    return k * J_poly(k - 1) + Fraction(1, 2**k) * (h * h)


def J_poly_direct(k) -> ExactPolynomial:
    """``J_k`` from the defining sum, without recursion."""
    out = ExactPolynomial((0,))
    for j in range(k + 1):
        h = hermite_poly(j)
        out = out + Fraction(math.factorial(k), 2**j * math.factorial(j)) * (h * h)
    return out


@lru_cache(maxsize=None)
def Q_poly(k) -> ExactPolynomial:
    """Integer polynomial ``Q_k(y)`` with ``q_k(z) = Q_k(sqrt(2) z)``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return ExactPolynomial((1,))
    if k == 1:
        return ExactPolynomial((0, 1))
    return Z * Q_poly(k - 1) + (k - 1) * Q_poly(k - 2)


def q_eval(k, z, deriv=0):
    """``d^deriv q_k / dz^deriv`` at ``z``."""
    return Q_poly(k).deriv(deriv)(math.sqrt(2.0) * np.asarray(z)) * math.sqrt(2.0) ** deriv


@dataclass(frozen=True)
class PolynomialFamily:
    """One member of the ``J`` or ``q`` family, evaluable in ``z``."""

    kind: str
    k: int

    def __post_init__(self):
        if self.kind not in ("J", "q"):
            raise ValueError("kind must be 'J' or 'q'")

    @property
    def poly(self) -> ExactPolynomial:
        """Exact coefficients in ``z`` (``q`` carries powers of sqrt(2), so it is
        exact only in ``y = sqrt(2) z``; see :func:`Q_poly`)."""
        return J_poly(self.k) if self.kind == "J" else Q_poly(self.k)

    def __call__(self, z, deriv=0):
        if self.kind == "J":
            return J_poly(self.k).deriv(deriv)(z)
        return q_eval(self.k, z, deriv)

    def certify_positive(self):
        """Exact proof that the member is positive on the real line.

        ``J_k`` (whose coefficients change sign from k=3) is certified by equality
        with its sum of weighted squares, whose ``j=0`` term is ``k! > 0``.
        ``q_k`` is certified by coefficient inspection, which succeeds for even k.
        """
        if self.kind == "J":
            return J_poly(self.k) == J_poly_direct(self.k)
        return self.poly.certify_positive()
