"""Convergence-order estimation and Richardson extrapolation."""

from __future__ import annotations

from typing import Sequence

import numpy as np
from numpy.typing import NDArray

__all__ = [
    "fit_order",
    "richardson_extrapolate",
    "relative_error",
]


def relative_error(value: complex | float, reference: complex | float) -> float:
    """Return |value - reference| / |reference| (absolute error when reference is 0)."""
    scale = abs(reference)
    diff = abs(value - reference)
    return diff / scale if scale > 0.0 else diff


def fit_order(steps: Sequence[float], errors: Sequence[float]) -> float:
    """
    Fit the observed convergence order p in error ≈ C·step^p.

    Least-squares slope of log(error) against log(step). Entries with a
    non-positive error (converged to machine zero) are skipped.

    Args:
        steps: Step sizes (e.g. ε = T/N).
        errors: Matching error magnitudes.

    Returns:
        The fitted order.

    Raises:
        ValueError: If fewer than two usable points remain.
    """
    h = np.asarray(steps, dtype=float)
    e = np.asarray(errors, dtype=float)
    if h.shape != e.shape:
        raise ValueError("steps and errors must have the same length")

    usable = (h > 0.0) & (e > 0.0) & np.isfinite(e)
    if np.count_nonzero(usable) < 2:
        raise ValueError("fit_order needs at least two positive error values")

    slope, _ = np.polyfit(np.log(h[usable]), np.log(e[usable]), 1)
    return float(slope)


def richardson_extrapolate(
        base_values: Sequence[NDArray[np.complex128] | complex | float],
        p: int,
        r: float = 2.0,
) -> NDArray[np.complex128] | complex:
    """
    Richardson extrapolation on a sequence of approximations.

    Args:
        base_values: Approximations at step sizes decreasing by ``r`` between
            successive entries.
        p: Order of the leading error term.
        r: Step-size reduction factor (default 2).

    Returns:
        The extrapolated value (complex-valued inputs are supported).

    Raises:
        ValueError: If fewer than two values are supplied.
    """
    n = len(base_values)
    if n < 2:
        raise ValueError("richardson_extrapolate requires at least two base values.")

    vals = [np.asarray(v, dtype=complex) for v in base_values]

    # Successive eliminations of the h^p, h^{p+1}, ... terms
    for j in range(1, n):
        factor = r ** (p + j - 1)
        for k in range(n - 1, j - 1, -1):
            vals[k] = (factor * vals[k] - vals[k - 1]) / (factor - 1.0)

    result = vals[-1]
    return complex(result) if result.ndim == 0 else result
