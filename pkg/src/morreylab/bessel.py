"""Bessel functions of the first kind for real order nu >= 0 and x >= 0.

Power series below ``SWITCH`` and the Hankel asymptotic expansion above it.
"""

from __future__ import annotations

import math

import numpy as np

SWITCH = 12.0
_SERIES_TERMS = 80
_HANKEL_TERMS = 30


def _series(nu: float, x: np.ndarray) -> np.ndarray:
    half = x / 2.0
    term = half**nu / math.gamma(nu + 1.0)
    total = term.copy()
    q = -(half**2)
    for k in range(1, _SERIES_TERMS):
        term = term * q / (k * (k + nu))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
            break
    return total


def _hankel(nu: float, x: np.ndarray) -> np.ndarray:
    mu = 4.0 * nu * nu
    omega = x - (nu / 2.0 + 0.25) * math.pi
    P = np.ones_like(x)
    Q = np.zeros_like(x)
    a = 1.0
    prev = np.full(x.shape, np.inf)
    for k in range(1, _HANKEL_TERMS):
        a *= (mu - (2 * k - 1) ** 2) / (k * 8.0)
        term = a / x**k
        # stop each point once the divergent tail starts growing
        live = np.abs(term) < prev
        if not np.any(live):
            break
        prev = np.where(live, np.abs(term), 0.0)
        t = np.where(live, term, 0.0)
        if k % 2 == 0:
            P += (-1) ** (k // 2) * t
        else:
            Q += (-1) ** ((k - 1) // 2) * t
        if a == 0.0:
            break
    return np.sqrt(2.0 / (math.pi * x)) * (P * np.cos(omega) - Q * np.sin(omega))


def bessel_j(nu: float, x) -> np.ndarray:
    if nu < 0:
        raise ValueError("order must be >= 0")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("argument must be >= 0")
    out = np.empty(x.shape)
    small = x < SWITCH
    if np.any(small):
        out[small] = _series(nu, x[small])
    if np.any(~small):
        out[~small] = _hankel(nu, x[~small])
    return out


def bessel_ratio(nu: float, t) -> np.ndarray:
    """``J_nu(t) / t^nu`` with its limit ``2^-nu / Gamma(nu+1)`` at t = 0."""
    t = np.asarray(t, dtype=float)
    out = np.full(t.shape, 0.5**nu / math.gamma(nu + 1.0))
    pos = t > 0
    out[pos] = bessel_j(nu, t[pos]) / t[pos] ** nu
    return out
