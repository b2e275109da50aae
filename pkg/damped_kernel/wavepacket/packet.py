"""
Analytic Gaussian wave-packet evolution under the closed kernel.

The initial packet ψ₀(q) = N₀ exp(-θ₀q² + (i/ħ)v₀q) is localized at q = 0.
With the kernel written as P exp{(i/ħ)(c_bb x² + c_aa q² + c_ab q x)}, the q
integral is a complex Gaussian with coefficient α = θ₀ - i c_aa/ħ and gives

    ψ_T(x) = P N₀ (π/α)^{1/2} exp{-θ₁(x - ⟨x⟩)² + (i/ħ)θ₂x²}

where θ₁ = c_ab²/(4ħ²α), ⟨x⟩ = -v₀/c_ab and θ₂ = c_bb.
"""

from __future__ import annotations

import cmath
import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import optimize

from damped_kernel.classical.core import DampedParams
from damped_kernel.kernel.propagator import quadratic_form
from damped_kernel.numerics.hyperbolic import (
    SERIES_THRESHOLD,
    expm1_neg,
    tanh_over_x,
    x_coth_x,
)

logger = logging.getLogger(__name__)

DEFAULT_THETA0 = 0.5


class NonConvergentIntegralError(ArithmeticError):
    """Raised when the q integral has a non-positive real Gaussian coefficient."""


@dataclass(frozen=True)
class GaussianPacket:
    """
    Initial packet N exp(-θq² + (i/ħ)v₀q) centred at q = 0.

    Use ``GaussianPacket.normalized`` to get the unit-norm factor.
    """

    theta: complex
    v0: float
    center: float = 0.0
    norm_factor: complex = 1.0

    def __post_init__(self) -> None:
        if not complex(self.theta).real > 0.0:
            raise ValueError(f"packet width needs Re(theta) > 0, got {self.theta}")
        if self.center != 0.0:
            raise ValueError("only packets centred at q = 0 are supported")

    @classmethod
    def normalized(cls, theta: complex = DEFAULT_THETA0, v0: float = 0.0) -> "GaussianPacket":
        theta = complex(theta)
        if not theta.real > 0.0:
            raise ValueError(f"packet width needs Re(theta) > 0, got {theta}")
        return cls(theta=theta, v0=v0, norm_factor=(2.0 * theta.real / np.pi) ** 0.25)

    def wavefunction(self, q: ArrayLike, hbar: float = 1.0) -> NDArray[np.complex128]:
        q = np.asarray(q, dtype=float)
        return self.norm_factor * np.exp(-complex(self.theta) * q * q + 1j * self.v0 * q / hbar)

    def envelope_width(self) -> float:
        """Standard deviation of |ψ₀|, 1/sqrt(2 Re θ)."""
        return 1.0 / np.sqrt(2.0 * complex(self.theta).real)


@dataclass(frozen=True)
class EvolvedPacket:
    """Gaussian packet at time T."""

    theta1: complex
    mean_x: float
    residual_phase: float
    norm: float
    amplitude: complex
    T: float
    hbar: float = 1.0

    @property
    def gaussian_coefficient(self) -> complex:
        """Full complex coefficient θ₁ - iθ₂/ħ multiplying -x² after expansion."""
        return self.theta1 - 1j * self.residual_phase / self.hbar

    def wavefunction(self, x: ArrayLike) -> NDArray[np.complex128]:
        x = np.asarray(x, dtype=float)
        shifted = x - self.mean_x
        return self.amplitude * np.exp(
            -self.theta1 * shifted * shifted + 1j * self.residual_phase * x * x / self.hbar
        )

    def density(self, x: ArrayLike) -> NDArray[np.float64]:
        return np.abs(self.wavefunction(x)) ** 2


def evolve_analytic(
        pkt: GaussianPacket,
        T: float,
        p: DampedParams,
        constant_phase: bool = False,
) -> EvolvedPacket:
    """
    Propagate a Gaussian packet by completing the square against the kernel.

    Args:
        pkt: Initial packet (centre 0).
        T: Duration, T > 0.
        p: Damping parameters.
        constant_phase: Use the kernel that keeps the sliced constant phase.

    Returns:
        EvolvedPacket with exact θ₁, ⟨x⟩, θ₂ and norm.

    Raises:
        ValueError: If T <= 0.
        NonConvergentIntegralError: If Re(α) <= 0.
    """
    if not T > 0.0:
        raise ValueError(f"duration T must be > 0, got {T}")

    form = quadratic_form(T, p, constant_phase=constant_phase)
    hbar = p.hbar
    alpha = complex(pkt.theta) - 1j * form.c_aa / hbar
    if not alpha.real > 0.0:
        raise NonConvergentIntegralError(f"Gaussian coefficient {alpha} has Re <= 0")

    theta1 = form.c_ab ** 2 / (4.0 * hbar ** 2 * alpha)
    mean_x = -pkt.v0 / form.c_ab
    amplitude = form.prefactor * complex(pkt.norm_factor) * cmath.sqrt(cmath.pi / alpha)
    norm = abs(amplitude) ** 2 * np.sqrt(np.pi / (2.0 * theta1.real))

    logger.debug("evolved packet T=%.6g theta1=%s <x>=%.12g norm=%.12g", T, theta1, mean_x, norm)
    return EvolvedPacket(
        theta1=complex(theta1),
        mean_x=float(mean_x),
        residual_phase=float(form.c_bb),
        norm=float(norm),
        amplitude=complex(amplitude),
        T=T,
        hbar=hbar,
    )


def mean_position(T: float, p: DampedParams, v0: float) -> float:
    """⟨x⟩ = v₀ tanh(κT)/κ; v₀T at κ = 0."""
    if T < 0.0:
        raise ValueError(f"T must be >= 0, got {T}")
    return float(v0 * T * tanh_over_x(p.kappa * T))


def _source_ratio(kappa: float, T: float) -> float:
    """κ tanh(κT/2)/(e^{-κT} - 1) as printed; its limit -κ/(1 + e^{-κT}) at small κT."""
    u = kappa * T
    if u < SERIES_THRESHOLD:
        return -kappa / (1.0 + np.exp(-u))
    return float(kappa * np.tanh(0.5 * u) / expm1_neg(u))


def mean_velocity(T: float, p: DampedParams, v0: float) -> float:
    """
    ⟨v⟩ = [2κ tanh(κT/2)/(e^{-κT} - 1)]⟨x⟩ + v₀, evaluated as printed.

    This equals v₀[1 - 2 tanh(κT)/(1 + e^{-κT})] and is not the time
    derivative of ⟨x⟩; see ``mean_velocity_derivative``.
    """
    if T < 0.0:
        raise ValueError(f"T must be >= 0, got {T}")
    if p.is_free:
        return float(v0)
    return float(2.0 * _source_ratio(p.kappa, T) * mean_position(T, p, v0) + v0)


def mean_velocity_derivative(T: float, p: DampedParams, v0: float) -> float:
    """d⟨x⟩/dT = v₀ sech²(κT)."""
    if T < 0.0:
        raise ValueError(f"T must be >= 0, got {T}")
    t = np.tanh(p.kappa * T)
    return float(v0 * (1.0 - t) * (1.0 + t))


def theta1_printed(T: float, p: DampedParams, alpha0: complex = DEFAULT_THETA0) -> complex:
    """
    θ₁ = [tanh²(κT)/(ħ²κ²)] / (4[α₀ - (i/ħ)(κ/(2 tanh κT) - κ tanh(κT/2)
         - κ tanh(κT/2)/(e^{-κT} - 1))]), evaluated as printed.

    The result differs from the completed-square θ₁ of ``evolve_analytic``;
    ``theta1_discrepancy`` measures by how much.

    Raises:
        ValueError: If T <= 0 or Re(α₀) <= 0.
    """
    if not T > 0.0:
        raise ValueError(f"duration T must be > 0, got {T}")
    alpha0 = complex(alpha0)
    if not alpha0.real > 0.0:
        raise ValueError(f"alpha0 needs a positive real part, got {alpha0}")

    kappa, hbar = p.kappa, p.hbar
    u = kappa * T
    numerator = (T * float(tanh_over_x(u))) ** 2 / hbar ** 2
    bracket = (
        float(x_coth_x(u)) / (2.0 * T)
        - kappa * np.tanh(0.5 * u)
        - _source_ratio(kappa, T)
    )
    return complex(numerator / (4.0 * (alpha0 - 1j * bracket / hbar)))


def theta1_discrepancy(T: float, p: DampedParams, alpha0: complex = DEFAULT_THETA0) -> float:
    """Relative difference |θ₁(printed) - θ₁(completed square)| / |θ₁(completed square)|."""
    analytic = evolve_analytic(GaussianPacket.normalized(alpha0, 0.0), T, p).theta1
    return abs(theta1_printed(T, p, alpha0) - analytic) / abs(analytic)


def velocity_zero_crossing(p: DampedParams, xtol: float = 1e-14) -> float:
    """
    Time at which ``mean_velocity`` changes sign, by bracketed bisection.

    κ enters only through κT and v₀ only as a scale, so the bracket
    [0, 10/κ] with unit v₀ covers every case.

    Raises:
        ValueError: If κ = 0 (the velocity never vanishes).
    """
    if p.is_free:
        raise ValueError("mean velocity of the free packet never vanishes")

    def velocity(T: float) -> float:
        return mean_velocity(T, p, 1.0)

    root = optimize.bisect(velocity, 0.0, 10.0 / p.kappa, xtol=xtol, maxiter=200)
    return float(root)


def initial_slope(p: DampedParams, v0: float, step: float = 1e-6) -> float:
    """Forward-difference d⟨x⟩/dT at T = 0⁺."""
    return (mean_position(step, p, v0) - mean_position(0.0, p, v0)) / step


__all__ = [
    "DEFAULT_THETA0",
    "NonConvergentIntegralError",
    "GaussianPacket",
    "EvolvedPacket",
    "evolve_analytic",
    "mean_position",
    "mean_velocity",
    "mean_velocity_derivative",
    "theta1_printed",
    "theta1_discrepancy",
    "velocity_zero_crossing",
    "initial_slope",
]
