"""Assembly of the N-slice kernel from the recursion."""

from __future__ import annotations

import cmath
import logging

import numpy as np

from damped_kernel.classical.core import BoundarySpec, DampedParams, companion_from_boundary
from damped_kernel.slicing.coefficients import (
    Seed,
    SliceGrid,
    run_recursion,
    short_time_coeffs,
)

logger = logging.getLogger(__name__)


def discrete_kernel(
        bc: BoundarySpec,
        p: DampedParams,
        N: int,
        seed: Seed = "hyperbolic",
        include_omega: bool = True,
) -> complex:
    """
    N-slice approximation of the damped-particle kernel.

    K_N = (1/2πiħε)^{1/2} Π_{k=1}^{N-1} (2ε(a₀ + a_{k-1}))^{-1/2}
          · exp{(i/ħ)[a(x_b² + x_a²) - 2b x_b x_a - R x_b - S x_a - ΣΩ]}

    with (a, b, R, S) the iterate N - 1 and Λ taken from the boundary pair.
    The product is accumulated as a sum of logarithms.

    Args:
        bc: Boundary pair and duration.
        p: Damping parameters.
        N: Slice count, N >= 2.
        seed: Short-time seed ("hyperbolic" or "polynomial").
        include_omega: Keep the remainder phase ΣΩ. Without it the N -> ∞
            limit is the closed kernel without its constant phase.

    Returns:
        The complex amplitude.

    Raises:
        ValueError: If N < 2.
    """
    grid = SliceGrid.from_duration(bc.T, N)
    eps = grid.epsilon
    Lambda = 0.0 if p.is_free else companion_from_boundary(bc, p).Lambda

    base = short_time_coeffs(p, eps, Lambda, seed=seed)
    trace = run_recursion(base, grid.N)
    last = trace.at(grid.N - 1)

    log_product = -0.5 * float(np.sum(np.log(2.0 * eps * trace.denominators[1:])))
    prefactor = cmath.sqrt(1.0 / (2j * cmath.pi * p.hbar * eps)) * np.exp(log_product)

    phase = (
        last.a * (bc.x_b ** 2 + bc.x_a ** 2)
        - 2.0 * last.b * bc.x_b * bc.x_a
        - last.R * bc.x_b
        - last.S * bc.x_a
    )
    if include_omega:
        phase -= trace.omega_total()

    logger.debug("discrete kernel N=%d eps=%.3e Lambda=%.6g phase=%.12g", grid.N, eps, Lambda, phase)
    return complex(prefactor * cmath.exp(1j * phase / p.hbar))
