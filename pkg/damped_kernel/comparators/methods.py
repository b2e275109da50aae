"""
Closed-form observables of the rival damped-quantization schemes.

LG is the companion-system kernel of this package; KOCHAN, CK
(Caldirola-Kanai) and DGST are evaluated from their published observable
formulas only. DGST shares CK's ⟨x⟩ and θ₁ and differs in ⟨v⟩.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from scipy import optimize

from damped_kernel.classical.core import DampedParams
from damped_kernel.numerics.hyperbolic import EXPM1_THRESHOLD, tanh_over_x, x_coth_x
from damped_kernel.wavepacket.packet import (
    DEFAULT_THETA0,
    mean_position,
    mean_velocity,
    theta1_printed,
    velocity_zero_crossing,
)

logger = logging.getLogger(__name__)


class MethodId(str, Enum):
    LG = "LG"
    KOCHAN = "KOCHAN"
    CK = "CK"
    DGST = "DGST"


@dataclass(frozen=True)
class ObservableSet:
    """⟨x⟩, ⟨v⟩ and θ₁ of one method at one time; θ₁ is None at T = 0."""

    mean_x: float
    mean_v: float
    theta1: Optional[complex]


def _u_over_one_minus_exp_neg(u: float) -> float:
    """u/(1 - e^{-u}), equal to 1 at u = 0."""
    if u < EXPM1_THRESHOLD:
        return 1.0 + 0.5 * u
    return u / -math.expm1(-u)


def _u_over_expm1(u: float) -> float:
    """u/(e^u - 1), equal to 1 at u = 0 and underflowing to 0 for large u."""
    if u < EXPM1_THRESHOLD:
        return 1.0 - 0.5 * u
    # u/(e^u - 1) = e^{-u} u/(1 - e^{-u})
    return math.exp(-u) * _u_over_one_minus_exp_neg(u)


def _dgst_velocity(v0: float, u: float) -> float:
    """v₀e^{u}; ±inf once e^{u} leaves the float range."""
    if v0 == 0.0:
        return 0.0
    try:
        return float(v0 * math.exp(u))
    except OverflowError:
        return math.copysign(math.inf, v0)


def _kochan(T: float, p: DampedParams, v0: float, alpha0: complex) -> ObservableSet:
    kappa, hbar = p.kappa, p.hbar
    u = kappa * T
    mean_x = v0 * T * float(tanh_over_x(0.5 * u))
    mean_v = 2.0 * v0 / (1.0 + math.exp(-u)) - 1.5 * kappa * mean_x

    theta1 = None
    if T > 0.0:
        # κ/tanh(κT/2) = 2 x_coth_x(κT/2)/T and κ/(1 - e^{κT}) = -(u/expm1(u))/T
        k_over_tanh = 2.0 * float(x_coth_x(0.5 * u)) / T
        k_over_growth = -_u_over_expm1(u) / T
        numerator = k_over_tanh ** 2 / (16.0 * hbar ** 2)
        theta1 = numerator / (alpha0 - 1j * (3.0 - math.exp(-u)) * k_over_growth / (4.0 * hbar))
    return ObservableSet(mean_x=mean_x, mean_v=mean_v, theta1=theta1)


def _ck_position_width(T: float, p: DampedParams, v0: float, alpha0: complex):
    kappa, hbar = p.kappa, p.hbar
    u = kappa * T
    mean_x = v0 * T / _u_over_one_minus_exp_neg(u) if T > 0.0 else 0.0

    theta1 = None
    if T > 0.0:
        # κ/(1 - e^{-κT})
        ratio = _u_over_one_minus_exp_neg(u) / T
        theta1 = (ratio ** 2 / (4.0 * hbar ** 2)) / (alpha0 - 1j * ratio / (2.0 * hbar))
    return mean_x, theta1


def observables(
        m: MethodId,
        T: float,
        p: DampedParams,
        v0: float,
        alpha0: complex = DEFAULT_THETA0,
) -> ObservableSet:
    """
    ⟨x⟩, ⟨v⟩ and θ₁ of method ``m`` at time T.

    KOCHAN: ⟨x⟩ = 2v₀ tanh(κT/2)/κ, ⟨v⟩ = 2v₀/(1 + e^{-κT}) - (3/2)κ⟨x⟩.
    CK:     ⟨x⟩ = (v₀/κ)(1 - e^{-κT}), ⟨v⟩ = v₀.
    DGST:   ⟨x⟩ and θ₁ as CK, ⟨v⟩ = v₀e^{κT} (±inf past the float range).
    LG:     ``mean_position``, ``mean_velocity`` and ``theta1_printed``.

    Raises:
        ValueError: If T < 0.
    """
    if T < 0.0:
        raise ValueError(f"T must be >= 0, got {T}")
    m = MethodId(m)
    alpha0 = complex(alpha0)

    if m is MethodId.LG:
        theta1 = theta1_printed(T, p, alpha0) if T > 0.0 else None
        return ObservableSet(
            mean_x=mean_position(T, p, v0),
            mean_v=mean_velocity(T, p, v0),
            theta1=theta1,
        )
    if m is MethodId.KOCHAN:
        return _kochan(T, p, v0, alpha0)

    mean_x, theta1 = _ck_position_width(T, p, v0, alpha0)
    if m is MethodId.CK:
        return ObservableSet(mean_x=mean_x, mean_v=float(v0), theta1=theta1)
    return ObservableSet(mean_x=mean_x, mean_v=_dgst_velocity(v0, p.kappa * T), theta1=theta1)


def _require_damping(p: DampedParams) -> None:
    if p.is_free:
        raise ValueError("kappa must be > 0")


def reliability_interval(m: MethodId, p: DampedParams) -> Tuple[float, float]:
    """
    Time interval on which the method's ⟨v⟩ stays non-negative.

    LG: [0, ln(1 + √2)/κ], KOCHAN: [0, ln 3/κ], CK and DGST: [0, ∞).
    """
    _require_damping(p)
    m = MethodId(m)
    if m is MethodId.LG:
        return 0.0, math.log(1.0 + math.sqrt(2.0)) / p.kappa
    if m is MethodId.KOCHAN:
        return 0.0, math.log(3.0) / p.kappa
    return 0.0, math.inf


def asymptote(m: MethodId, p: DampedParams, v0: float) -> float:
    """T -> ∞ limit of ⟨x⟩: 2v₀/κ for KOCHAN, v₀/κ otherwise."""
    _require_damping(p)
    scale = 2.0 if MethodId(m) is MethodId.KOCHAN else 1.0
    return scale * v0 / p.kappa


def velocity_zero(m: MethodId, p: DampedParams) -> Optional[float]:
    """Zero of ⟨v⟩ by bisection (LG, KOCHAN); None for methods whose ⟨v⟩ never vanishes."""
    _require_damping(p)
    m = MethodId(m)
    if m is MethodId.LG:
        return velocity_zero_crossing(p)
    if m is MethodId.KOCHAN:
        def velocity(T: float) -> float:
            return _kochan(T, p, 1.0, DEFAULT_THETA0).mean_v

        root = float(optimize.bisect(velocity, 0.0, 10.0 / p.kappa, xtol=1e-14, maxiter=200))
        logger.debug("KOCHAN velocity zero at T=%.12g", root)
        return root
    return None


def max_velocity_gap(p: DampedParams, v0: float, t_values) -> float:
    """max |⟨v⟩_LG - ⟨v⟩_KOCHAN| over the given times."""
    gaps = [
        abs(observables(MethodId.LG, t, p, v0).mean_v - observables(MethodId.KOCHAN, t, p, v0).mean_v)
        for t in t_values
    ]
    return float(np.max(gaps)) if gaps else 0.0
