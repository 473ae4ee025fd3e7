"""Exact derivatives of ``P(z) * exp(kappa z^2)`` and related helpers."""

from math import comb

import numpy as np


def exp_quadratic_factors(z, kappa, m):
    """Polynomials ``p_j`` with ``d^j/dz^j exp(kappa z^2) = p_j(z) exp(kappa z^2)``.

    Returned as values at ``z`` for ``j = 0..m``.  ``kappa`` may be an array
    broadcasting against ``z``.
    """
    kappa = np.asarray(kappa)
    coeffs = [np.ones_like(kappa, dtype=complex)]
    out = [np.ones(np.broadcast(z, kappa).shape, dtype=complex)]
    for _ in range(m):
        nxt = [np.zeros_like(coeffs[0]) for _ in range(len(coeffs) + 1)]
        for k, c in enumerate(coeffs):
            if k >= 1:
                nxt[k - 1] = nxt[k - 1] + k * c
            nxt[k + 1] = nxt[k + 1] + 2.0 * kappa * c
        coeffs = nxt
        val = np.zeros_like(out[0])
        for c in reversed(coeffs):
            val = val * z + c
        out.append(val)
    return out


def leibniz(poly_derivs, z, kappa, m):
    """Values of ``(P exp(kappa z^2))^{(j)} / exp(kappa z^2)`` for ``j = 0..m``.

    ``poly_derivs[j]`` holds ``P^{(j)}(z)``.
    """
    p = exp_quadratic_factors(z, kappa, m)
    return [sum(comb(j, i) * poly_derivs[j - i] * p[i] for i in range(j + 1)) for j in range(m + 1)]


def hermite_values(n, z):
    """Physicists' Hermite polynomials ``H_0..H_n`` at ``z`` by the three-term recursion."""
    z = np.asarray(z)
    h = [np.ones_like(z, dtype=np.result_type(z, float))]
    if n >= 1:
        h.append(2.0 * z)
    for k in range(1, n):
        h.append(2.0 * z * h[k] - 2.0 * k * h[k - 1])
    return h


def hermite_derivs(n, z, m):
    """``d^j H_n / dz^j`` at ``z`` for ``j = 0..m`` (uses ``H_n' = 2n H_{n-1}``)."""
    h = hermite_values(n, z)
    out = []
    factor = 1.0
    for j in range(m + 1):
        out.append(factor * h[n - j] if j <= n else np.zeros_like(h[0]))
        factor *= 2.0 * (n - j)
    return out


def log_derivs(u_derivs):
    """Derivatives ``w, w', ...`` of ``w = u'/u`` from ``u, u', u'', ...``.

    Uses ``u^{(j+1)} = sum_i C(j, i) w^{(i)} u^{(j-i)}``.
    """
    u = u_derivs[0]
    w = []
    for j in range(len(u_derivs) - 1):
        acc = u_derivs[j + 1] - sum(comb(j, i) * w[i] * u_derivs[j - i] for i in range(j))
        w.append(acc / u)
    return w
