"""
Overflow- and cancellation-safe hyperbolic helpers.

Every helper accepts scalars or numpy arrays and returns the same shape.
Large arguments are handled in scaled exponential form so that ratios such
as sinh(m x)/sinh(n x) stay finite for arguments far beyond ~710, where
``np.sinh`` overflows. Small arguments switch to truncated series below
``SERIES_THRESHOLD``.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray

# Below this |u| the series branches are used (12+ significant digits kept)
SERIES_THRESHOLD = 1.0e-6

# Below this the first-order expansion of e^{-u} - 1 is used
EXPM1_THRESHOLD = 1.0e-8

__all__ = [
    "SERIES_THRESHOLD",
    "EXPM1_THRESHOLD",
    "expm1_neg",
    "x_coth_x",
    "x_csch_x",
    "tanh_over_x",
    "coth",
    "sinh_ratio",
    "x_minus_tanh_x",
]


def _finish(out: NDArray[np.float64]) -> NDArray[np.float64] | float:
    return out[()] if out.ndim == 0 else out


def expm1_neg(u: ArrayLike) -> NDArray[np.float64] | float:
    """Return e^{-u} - 1, using -u(1 - u/2) when |u| < ``EXPM1_THRESHOLD``."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < EXPM1_THRESHOLD
    out = np.where(small, -u * (1.0 - 0.5 * u), np.expm1(-u))
    return _finish(out)


def x_coth_x(u: ArrayLike) -> NDArray[np.float64] | float:
    """Return u·coth(u), equal to 1 at u = 0."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < SERIES_THRESHOLD
    safe = np.where(small, 1.0, u)
    out = np.where(small, 1.0 + u * u / 3.0, safe / np.tanh(safe))
    return _finish(out)


def x_csch_x(u: ArrayLike) -> NDArray[np.float64] | float:
    """Return u/sinh(u), equal to 1 at u = 0 and finite for any |u|."""
    u = np.abs(np.asarray(u, dtype=float))
    small = u < SERIES_THRESHOLD
    safe = np.where(small, 1.0, u)
    # u/sinh(u) = -2u e^{-u} / expm1(-2u)
    scaled = -2.0 * safe * np.exp(-safe) / np.expm1(-2.0 * safe)
    out = np.where(small, 1.0 - u * u / 6.0, scaled)
    return _finish(out)


def tanh_over_x(u: ArrayLike) -> NDArray[np.float64] | float:
    """Return tanh(u)/u, equal to 1 at u = 0."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < SERIES_THRESHOLD
    safe = np.where(small, 1.0, u)
    out = np.where(small, 1.0 - u * u / 3.0, np.tanh(safe) / safe)
    return _finish(out)


def coth(u: ArrayLike) -> NDArray[np.float64] | float:
    """Return coth(u) for u > 0 without overflow."""
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0.0):
        raise ValueError("coth is evaluated for positive arguments only")
    out = -(1.0 + np.exp(-2.0 * u)) / np.expm1(-2.0 * u)
    return _finish(out)


def sinh_ratio(m: ArrayLike, n: ArrayLike, x: float) -> NDArray[np.float64] | float:
    """
    Return sinh(m·x)/sinh(n·x) for 0 < m <= n and x > 0.

    Evaluated as e^{-(n-m)x}·(1 - e^{-2mx})/(1 - e^{-2nx}), which never
    forms sinh of a large argument.

    Args:
        m: Numerator multiplier (scalar or array).
        n: Denominator multiplier (scalar or array).
        x: Common positive argument.

    Returns:
        The ratio, broadcast over m and n.
    """
    if x <= 0.0:
        raise ValueError(f"sinh_ratio needs x > 0, got {x}")
    m = np.asarray(m, dtype=float)
    n = np.asarray(n, dtype=float)
    out = np.exp(-(n - m) * x) * np.expm1(-2.0 * m * x) / np.expm1(-2.0 * n * x)
    return _finish(out)


def x_minus_tanh_x(z: ArrayLike) -> NDArray[np.float64] | float:
    """Return z - tanh(z); the odd series z³/3 - 2z⁵/15 + 17z⁷/315 below |z| = 1e-2."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < 1.0e-2
    z2 = z * z
    series = z * z2 * (1.0 / 3.0 - z2 * (2.0 / 15.0 - z2 * 17.0 / 315.0))
    out = np.where(small, series, z - np.tanh(z))
    return _finish(out)
