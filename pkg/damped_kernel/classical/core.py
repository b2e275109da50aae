"""
Exact classical motion of the damped free particle and its conservative companion.

The damped particle ẍ + κẋ = 0 (unit mass) moves on x(t) = Λ + ηe^{-κt}. Along
that curve it also satisfies ẍ = κ²(x - Λ), an inverted oscillator centred on
Λ. The companion system depends on the data (initial condition or boundary
pair) through Λ, which is why every constructor here returns a
``CompanionParams``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from damped_kernel.numerics.hyperbolic import expm1_neg

logger = logging.getLogger(__name__)

# Trajectory callable used by stationarity_residual: t -> (x(t), x''(t))
TrajectoryFn = Callable[[NDArray[np.float64]], Tuple[NDArray[np.float64], NDArray[np.float64]]]


@dataclass(frozen=True)
class DampedParams:
    """Friction coefficient κ (1/time) and action scale ħ; unit mass."""

    kappa: float
    hbar: float = 1.0

    def __post_init__(self) -> None:
        if not np.isfinite(self.kappa) or self.kappa < 0.0:
            raise ValueError(f"kappa must be finite and >= 0, got {self.kappa}")
        if not np.isfinite(self.hbar) or self.hbar <= 0.0:
            raise ValueError(f"hbar must be finite and > 0, got {self.hbar}")

    @property
    def is_free(self) -> bool:
        return self.kappa == 0.0


@dataclass(frozen=True)
class InitialCondition:
    x0: float
    v0: float


@dataclass(frozen=True)
class BoundarySpec:
    """Endpoints x(0) = x_a and x(T) = x_b with duration T > 0."""

    x_a: float
    x_b: float
    T: float

    def __post_init__(self) -> None:
        if not self.T > 0.0:
            raise ValueError(f"duration T must be > 0, got {self.T}")


@dataclass(frozen=True)
class PhasePoint:
    x: float
    v: float


@dataclass(frozen=True)
class CompanionParams:
    """Constants of x(t) = Λ + ηe^{-κt}."""

    Lambda: float
    eta: float

    def trajectory(self, t: ArrayLike, p: DampedParams) -> NDArray[np.float64] | float:
        """Reconstruct x(t) = Λ + ηe^{-κt}."""
        t = np.asarray(t, dtype=float)
        out = self.Lambda + self.eta * np.exp(-p.kappa * t)
        return out[()] if out.ndim == 0 else out

    def velocity(self, t: ArrayLike, p: DampedParams) -> NDArray[np.float64] | float:
        t = np.asarray(t, dtype=float)
        out = -p.kappa * self.eta * np.exp(-p.kappa * t)
        return out[()] if out.ndim == 0 else out

    def acceleration(self, t: ArrayLike, p: DampedParams) -> NDArray[np.float64] | float:
        t = np.asarray(t, dtype=float)
        out = p.kappa * p.kappa * self.eta * np.exp(-p.kappa * t)
        return out[()] if out.ndim == 0 else out


def solve_damped(ic: InitialCondition, p: DampedParams, t: float) -> PhasePoint:
    """
    Exact state of the damped particle at time t.

    Args:
        ic: Initial position and velocity.
        p: Damping parameters; κ = 0 gives free motion.
        t: Time (any finite value, including t = inf for the rest position).

    Returns:
        PhasePoint with x(t), v(t).
    """
    if p.is_free:
        return PhasePoint(x=ic.x0 + ic.v0 * t, v=ic.v0)

    c = companion_from_ic(ic, p)
    decay = np.exp(-p.kappa * t)
    return PhasePoint(x=float(c.Lambda + c.eta * decay), v=float(-p.kappa * c.eta * decay))


def companion_from_ic(ic: InitialCondition, p: DampedParams) -> CompanionParams:
    """
    Companion constants from an initial condition: Λ = x₀ + v₀/κ, η = -v₀/κ.

    Raises:
        ValueError: If κ = 0 (no companion; the free path applies).
    """
    if p.is_free:
        raise ValueError("companion system is undefined for kappa = 0; use the free-particle path")
    return CompanionParams(Lambda=ic.x0 + ic.v0 / p.kappa, eta=-ic.v0 / p.kappa)


def companion_from_boundary(bc: BoundarySpec, p: DampedParams) -> CompanionParams:
    """
    Companion constants from a boundary pair.

    η = (x_b - x_a)/(e^{-κT} - 1) and Λ = x_a - η. The denominator switches to
    -κT(1 - κT/2) below κT = 1e-8.

    Raises:
        ValueError: If κ = 0.
    """
    if p.is_free:
        raise ValueError("companion system is undefined for kappa = 0; use the free-particle path")

    denom = float(expm1_neg(p.kappa * bc.T))
    eta = (bc.x_b - bc.x_a) / denom
    return CompanionParams(Lambda=bc.x_a - eta, eta=eta)


def conservative_force(x: ArrayLike, c: CompanionParams, p: DampedParams) -> NDArray[np.float64] | float:
    """Companion force -κ²(x - Λ)."""
    x = np.asarray(x, dtype=float)
    out = -p.kappa ** 2 * (x - c.Lambda)
    return out[()] if out.ndim == 0 else out


def companion_stiffness(p: DampedParams) -> float:
    """Restoring coefficient of the companion system, -κ² (never positive)."""
    return -p.kappa ** 2


def lagrangian_density(pp: PhasePoint, c: CompanionParams, p: DampedParams) -> float:
    """Companion Lagrangian ½v² + ½κ²x² - κ²Λx."""
    k2 = p.kappa ** 2
    return 0.5 * pp.v ** 2 + 0.5 * k2 * pp.x ** 2 - k2 * c.Lambda * pp.x


def companion_energy(pp: PhasePoint, c: CompanionParams, p: DampedParams) -> float:
    """Conserved energy of the companion, ½v² - ½κ²(x - Λ)²."""
    return 0.5 * pp.v ** 2 - 0.5 * p.kappa ** 2 * (pp.x - c.Lambda) ** 2


def stationarity_residual(
        ic: InitialCondition,
        p: DampedParams,
        t_grid: Sequence[float],
        trajectory: Optional[TrajectoryFn] = None,
) -> float:
    """
    Maximum of |ẍ(t) - κ²(x(t) - Λ)| over a time grid.

    Args:
        ic: Initial condition that fixes Λ.
        p: Damping parameters (κ > 0).
        t_grid: Evaluation times.
        trajectory: Optional t -> (x, ẍ) callable. Defaults to the analytic
            damped trajectory with its analytic second derivative.

    Returns:
        The maximum residual (0.0 for an empty grid).
    """
    c = companion_from_ic(ic, p)
    t = np.asarray(t_grid, dtype=float)
    if t.size == 0:
        return 0.0

    if trajectory is None:
        x = np.asarray(c.trajectory(t, p), dtype=float)
        xdd = np.asarray(c.acceleration(t, p), dtype=float)
    else:
        x, xdd = trajectory(t)

    residual = np.abs(xdd - p.kappa ** 2 * (x - c.Lambda))
    worst = float(np.max(residual))
    logger.debug("stationarity residual %.3e over %d points", worst, t.size)
    return worst
