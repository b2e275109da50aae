"""
Short-time coefficients and the Gaussian-integration recursion.

Each short-time factor of the sliced path integral has the exponent

    (i/ħ)[a₀(x_{k+1}² + x_k²) - 2b₀x_{k+1}x_k - R₀x_{k+1} - S₀x_k]

Integrating out one intermediate point maps (a, b, R, S) of the accumulated
kernel to the next iterate and leaves a constant remainder Ω_k. The map keeps
a_k² - b_k² equal to the seed gap a₀² - b₀², which is what makes the
accumulated kernel keep the same symmetric form at every step.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from damped_kernel.classical.core import DampedParams

logger = logging.getLogger(__name__)

Seed = Literal["hyperbolic", "polynomial"]
SEEDS: tuple[str, ...] = ("hyperbolic", "polynomial")

# Tolerance on |a_k² - b_k² - gap| / a₀²
CONSISTENCY_TOL = 1.0e-12


class SliceDegeneracyError(ArithmeticError):
    """Raised when the completed-square coefficient a₀ + a_{k-1} is not usable."""


class ConsistencyError(ArithmeticError):
    """Raised when an iterate breaks a_k² - b_k² = a₀² - b₀²."""


@dataclass(frozen=True)
class SliceGrid:
    """N slices of duration epsilon."""

    N: int
    epsilon: float

    def __post_init__(self) -> None:
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"slice count N must be an integer >= 2, got {self.N}")
        if not self.epsilon > 0.0:
            raise ValueError(f"slice duration must be > 0, got {self.epsilon}")

    @classmethod
    def from_duration(cls, T: float, N: int) -> "SliceGrid":
        if not T > 0.0:
            raise ValueError(f"duration T must be > 0, got {T}")
        if int(N) != N or N < 2:
            raise ValueError(f"slice count N must be an integer >= 2, got {N}")
        return cls(N=int(N), epsilon=T / N)

    @property
    def T(self) -> float:
        return self.N * self.epsilon


@dataclass(frozen=True)
class SliceCoefficients:
    """
    One iterate (a_k, b_k, R_k, S_k, Ω_k) of the recursion.

    ``gap`` is a₀² - b₀² of the seed, carried along so every step can use it
    without recomputing it from rounded a₀ and b₀.
    """

    a: float
    b: float
    R: float
    S: float
    Omega: float
    gap: float

    def consistency_defect(self, a0: float) -> float:
        """|a² - b² - gap| relative to a₀²."""
        return abs((self.a - self.b) * (self.a + self.b) - self.gap) / (a0 * a0)


@dataclass(frozen=True)
class RecursionTrace:
    """
    Every iterate of a recursion run, index k = 0 .. n-1.

    ``Omega[0]`` is 0 (the seed has no remainder) and ``denominators[k]``
    holds a₀ + a_{k-1} for k >= 1 (``denominators[0]`` is unused and NaN).
    """

    a: NDArray[np.float64]
    b: NDArray[np.float64]
    R: NDArray[np.float64]
    S: NDArray[np.float64]
    Omega: NDArray[np.float64]
    denominators: NDArray[np.float64]
    gap: float

    def __len__(self) -> int:
        return int(self.a.size)

    def at(self, k: int) -> SliceCoefficients:
        return SliceCoefficients(
            a=float(self.a[k]),
            b=float(self.b[k]),
            R=float(self.R[k]),
            S=float(self.S[k]),
            Omega=float(self.Omega[k]),
            gap=self.gap,
        )

    def consistency_defects(self) -> NDArray[np.float64]:
        a0 = self.a[0]
        return np.abs((self.a - self.b) * (self.a + self.b) - self.gap) / (a0 * a0)

    def omega_total(self) -> float:
        """Σ Ω_k over k = 1 .. n-1."""
        return float(np.sum(self.Omega[1:]))


def short_time_coeffs(
        p: DampedParams,
        eps: float,
        Lambda: float,
        seed: Seed = "hyperbolic",
) -> SliceCoefficients:
    """
    Seed coefficients of one short-time factor.

    b₀ = 1/(2ε), R₀ = S₀ = κ²Λε/2 and a₀ = b₀ + δ with the seed excess
    δ = b₀(κε)²/2 (polynomial) or δ = 2b₀sinh²(κε/2), i.e. a₀ = b₀cosh κε
    (hyperbolic, exact for the closed forms at any ε).

    Args:
        p: Damping parameters.
        eps: Slice duration ε > 0.
        Lambda: Companion rest position Λ.
        seed: "hyperbolic" (default) or "polynomial".

    Returns:
        The seed iterate with Ω = 0.

    Raises:
        ValueError: If eps <= 0 or the seed name is unknown.
    """
    if not eps > 0.0:
        raise ValueError(f"slice duration must be > 0, got {eps}")
    if seed not in SEEDS:
        raise ValueError(f"unknown seed {seed!r}; expected one of {SEEDS}")

    b0 = 0.5 / eps
    x = p.kappa * eps
    if seed == "hyperbolic":
        excess = 2.0 * b0 * np.sinh(0.5 * x) ** 2
    else:
        excess = 0.5 * b0 * x * x

    source = 0.5 * p.kappa ** 2 * Lambda * eps
    return SliceCoefficients(
        a=b0 + excess,
        b=b0,
        R=source,
        S=source,
        Omega=0.0,
        gap=float(excess * (2.0 * b0 + excess)),
    )


def _advance(a: float, b: float, R: float, S: float, base: SliceCoefficients):
    c = base.a + a
    if not np.isfinite(c) or c <= np.finfo(float).tiny:
        raise SliceDegeneracyError(f"a0 + a_(k-1) = {c!r} is not a usable positive number")

    # a₀ - b₀²/c rewritten so that nothing cancels when a₀ ≈ b₀
    a_next = (base.gap + base.a * a) / c
    b_next = base.b * b / c
    source = R + base.S
    R_next = base.R + base.b * source / c
    S_next = S + b * source / c
    omega = source * source / (4.0 * c)
    return a_next, b_next, R_next, S_next, omega, c


def recursion_step(
        prev: SliceCoefficients,
        base: SliceCoefficients,
        check: bool = True,
) -> SliceCoefficients:
    """
    Integrate out one intermediate point.

    With c = a₀ + a_{k-1}:
    a_k = a₀ - b₀²/c, b_k = b₀b_{k-1}/c, R_k = R₀ + b₀(R_{k-1} + S₀)/c,
    S_k = S_{k-1} + b_{k-1}(R_{k-1} + S₀)/c, Ω_k = (R_{k-1} + S₀)²/(4c).

    Args:
        prev: Iterate k-1.
        base: Seed iterate (k = 0).
        check: Verify the consistency identity on the result.

    Returns:
        Iterate k.

    Raises:
        SliceDegeneracyError: If a₀ + a_{k-1} underflows or is not finite.
        ConsistencyError: If a_k² - b_k² drifts from a₀² - b₀² by more than
            ``CONSISTENCY_TOL`` relative to a₀².
    """
    a, b, R, S, omega, _ = _advance(prev.a, prev.b, prev.R, prev.S, base)
    out = SliceCoefficients(a=a, b=b, R=R, S=S, Omega=omega, gap=base.gap)

    if check:
        defect = out.consistency_defect(base.a)
        if defect > CONSISTENCY_TOL:
            raise ConsistencyError(
                f"a_k^2 - b_k^2 drifted from the seed gap by {defect:.3e} (relative to a0^2)"
            )
    return out


def run_recursion(base: SliceCoefficients, n: int, check: bool = True) -> RecursionTrace:
    """
    Run the recursion from the seed and keep all n iterates (k = 0 .. n-1).

    Args:
        base: Seed iterate.
        n: Number of iterates, n >= 1 (n - 1 integrations).
        check: Verify the consistency identity on every iterate.

    Returns:
        RecursionTrace with numpy arrays of a, b, R, S, Ω.

    Raises:
        SliceDegeneracyError, ConsistencyError: As for ``recursion_step``.
    """
    if n < 1:
        raise ValueError(f"need at least one iterate, got n={n}")

    a = np.empty(n)
    b = np.empty(n)
    R = np.empty(n)
    S = np.empty(n)
    omega = np.zeros(n)
    denom = np.full(n, np.nan)

    a[0], b[0], R[0], S[0] = base.a, base.b, base.R, base.S
    ak, bk, Rk, Sk = base.a, base.b, base.R, base.S
    for k in range(1, n):
        ak, bk, Rk, Sk, omega[k], denom[k] = _advance(ak, bk, Rk, Sk, base)
        a[k], b[k], R[k], S[k] = ak, bk, Rk, Sk

    trace = RecursionTrace(a=a, b=b, R=R, S=S, Omega=omega, denominators=denom, gap=base.gap)

    if check:
        defects = trace.consistency_defects()
        worst = int(np.argmax(defects))
        if defects[worst] > CONSISTENCY_TOL:
            raise ConsistencyError(
                f"a_k^2 - b_k^2 drifted from the seed gap by {defects[worst]:.3e} at k={worst}"
            )

    logger.debug("recursion ran %d iterates (a0=%.6g, gap=%.3e)", n, base.a, base.gap)
    return trace
