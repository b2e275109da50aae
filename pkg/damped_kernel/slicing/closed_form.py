"""
Closed-form iterates of the slicing recursion (hyperbolic seed).

With x = κε:

    a_k = (1/2ε) sinh x · coth((k+1)x)
    b_k = (1/2ε) sinh x / sinh((k+1)x)
    a₀ + a_{k-1} = (1/2ε) sinh((k+1)x) / sinh(kx)

The source terms follow from the running sums
Q_k = Σ_{l<=k} sinh(lx)/sinh(kx), which obey Q_k = 1 + ρ_{k-1}Q_{k-1} with
ρ_j = sinh(jx)/sinh((j+1)x). Then R_k = r(1 + 2ρ_kQ_k),
S_k = r(1 + 2Σ_{j<=k} σ_jQ_j) with σ_j = sinh x/sinh((j+1)x) and r = κ²Λε/2.
All ratios are evaluated through ``sinh_ratio`` so (k+1)x may exceed 700.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from damped_kernel.classical.core import DampedParams
from damped_kernel.numerics.hyperbolic import coth, sinh_ratio, x_minus_tanh_x

__all__ = [
    "ClosedFormTable",
    "closed_form_ab",
    "closed_form_RS",
    "closed_form_table",
    "source_limit",
    "omega_limit",
    "omega_sum",
]


@dataclass(frozen=True)
class ClosedFormTable:
    """Closed-form a, b, R, S, Ω for k = 0 .. n-1 (Ω[0] = 0)."""

    a: NDArray[np.float64]
    b: NDArray[np.float64]
    R: NDArray[np.float64]
    S: NDArray[np.float64]
    Omega: NDArray[np.float64]


def _check_eps(eps: float) -> None:
    if not eps > 0.0:
        raise ValueError(f"slice duration must be > 0, got {eps}")


def closed_form_ab(
        k: ArrayLike,
        p: DampedParams,
        eps: float,
) -> Tuple[NDArray[np.float64] | float, NDArray[np.float64] | float]:
    """
    Closed-form (a_k, b_k).

    Args:
        k: Iterate index (scalar or array), k >= 0.
        p: Damping parameters.
        eps: Slice duration.

    Returns:
        Tuple (a_k, b_k), broadcast over k.
    """
    _check_eps(eps)
    k = np.asarray(k, dtype=float)
    if np.any(k < 0):
        raise ValueError("iterate index k must be >= 0")

    scale = 0.5 / eps
    if p.is_free:
        a = scale / (k + 1.0)
        b = a.copy()
    else:
        x = p.kappa * eps
        a = scale * np.sinh(x) * np.asarray(coth((k + 1.0) * x))
        b = scale * np.asarray(sinh_ratio(1.0, k + 1.0, x))

    if a.ndim == 0:
        return float(a), float(b)
    return a, b


def _running_sums(n: int, x: float) -> Tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
    """ρ_k, σ_k and Q_k for k = 0 .. n-1."""
    k = np.arange(n, dtype=float)
    rho = np.asarray(sinh_ratio(k, k + 1.0, x), dtype=float)
    sigma = np.asarray(sinh_ratio(1.0, k + 1.0, x), dtype=float)

    # Q_0 only enters through ρ_0 = 0
    Q = np.empty(n)
    Q[0] = 0.5
    for j in range(1, n):
        Q[j] = 1.0 + rho[j - 1] * Q[j - 1]
    return rho, sigma, Q


def closed_form_table(n: int, p: DampedParams, eps: float, Lambda: float) -> ClosedFormTable:
    """
    Closed-form iterates k = 0 .. n-1 in O(n) work.

    Args:
        n: Number of iterates (n >= 1).
        p: Damping parameters.
        eps: Slice duration.
        Lambda: Companion rest position.

    Returns:
        ClosedFormTable of numpy arrays.
    """
    _check_eps(eps)
    if n < 1:
        raise ValueError(f"need at least one iterate, got n={n}")

    k = np.arange(n, dtype=float)
    a, b = closed_form_ab(k, p, eps)
    a = np.atleast_1d(a)
    b = np.atleast_1d(b)

    if p.is_free or Lambda == 0.0:
        zeros = np.zeros(n)
        return ClosedFormTable(a=a, b=b, R=zeros, S=zeros.copy(), Omega=zeros.copy())

    x = p.kappa * eps
    r = 0.5 * p.kappa ** 2 * Lambda * eps
    rho, sigma, Q = _running_sums(n, x)

    R = r * (1.0 + 2.0 * rho * Q)
    increments = sigma * Q
    increments[0] = 0.0
    S = r * (1.0 + 2.0 * np.cumsum(increments))

    # Ω_k = (R_{k-1} + S₀)²/(4(a₀ + a_{k-1})) = 2ε r² ρ_k Q_k²
    omega = 2.0 * eps * r * r * rho * Q * Q
    omega[0] = 0.0
    return ClosedFormTable(a=a, b=b, R=R, S=S, Omega=omega)


def closed_form_RS(k: int, p: DampedParams, eps: float, Lambda: float) -> Tuple[float, float]:
    """
    Closed-form (R_k, S_k) through the running sums up to k.

    Args:
        k: Iterate index, k >= 0.
        p: Damping parameters.
        eps: Slice duration.
        Lambda: Companion rest position.

    Returns:
        Tuple (R_k, S_k).
    """
    if int(k) != k or k < 0:
        raise ValueError(f"iterate index k must be a non-negative integer, got {k}")
    table = closed_form_table(int(k) + 1, p, eps, Lambda)
    return float(table.R[-1]), float(table.S[-1])


def source_limit(T: float, p: DampedParams, Lambda: float) -> float:
    """N -> ∞ limit of R_N and S_N: κΛ tanh(κT/2) = κΛ(e^{κT} - 1)/(e^{κT} + 1)."""
    return float(p.kappa * Lambda * np.tanh(0.5 * p.kappa * T))


def omega_limit(T: float, p: DampedParams, Lambda: float) -> float:
    """N -> ∞ limit of the remainder sum: κΛ²(κT/2 - tanh(κT/2))."""
    return float(p.kappa * Lambda ** 2 * x_minus_tanh_x(0.5 * p.kappa * T))


def omega_sum(N: int, p: DampedParams, eps: float, Lambda: float) -> float:
    """
    Total remainder Σ_{k=1}^{N-1} Ω_k of the N - 1 integrations.

    N = 1 is the empty sum. The result tends to ``omega_limit(N·ε, ...)``
    as N grows at fixed N·ε.
    """
    if int(N) != N or N < 1:
        raise ValueError(f"N must be an integer >= 1, got {N}")
    if N == 1:
        return 0.0
    table = closed_form_table(int(N), p, eps, Lambda)
    return float(np.sum(table.Omega[1:]))
