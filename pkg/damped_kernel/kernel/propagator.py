"""
Closed-form kernel of the damped free particle.

With u = κT and Λ fixed by the endpoints through Λ = x_a - (x_b - x_a)/(e^{-u} - 1),

    K = (κ/2πiħ sinh u)^{1/2} exp{(i/ħ)[κ/(2 tanh u)(x_b² + x_a²)
        - κ x_b x_a / sinh u - κΛ tanh(u/2)(x_b + x_a)]}

The square root is taken on the principal branch, so the prefactor carries
e^{-iπ/4} and joins the free Schrödinger kernel continuously as κ -> 0.
"""

from __future__ import annotations

import cmath
import logging
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from damped_kernel.classical.core import BoundarySpec, DampedParams
from damped_kernel.numerics.hyperbolic import (
    expm1_neg,
    x_coth_x,
    x_csch_x,
    x_minus_tanh_x,
)

logger = logging.getLogger(__name__)

_PHASE_QUARTER = cmath.exp(-0.25j * cmath.pi)


@dataclass(frozen=True)
class KernelQuadraticForm:
    """
    K(x_b, x_a) = prefactor · exp{(i/ħ)(c_bb x_b² + c_aa x_a² + c_ab x_a x_b
    + c_b x_b + c_a x_a + constant)}.
    """

    prefactor: complex
    c_aa: float
    c_bb: float
    c_ab: float
    c_a: float = 0.0
    c_b: float = 0.0
    constant: float = 0.0
    hbar: float = 1.0

    def exponent(self, x_b: ArrayLike, x_a: ArrayLike) -> NDArray[np.float64]:
        x_b = np.asarray(x_b, dtype=float)
        x_a = np.asarray(x_a, dtype=float)
        return (
            self.c_bb * x_b * x_b
            + self.c_aa * x_a * x_a
            + self.c_ab * x_a * x_b
            + self.c_b * x_b
            + self.c_a * x_a
            + self.constant
        )

    def evaluate(self, x_b: ArrayLike, x_a: ArrayLike) -> NDArray[np.complex128] | complex:
        """Rebuild K on (x_b, x_a), broadcasting numpy arrays."""
        out = self.prefactor * np.exp(1j * self.exponent(x_b, x_a) / self.hbar)
        return complex(out) if np.ndim(out) == 0 else out


def _check_duration(T: float) -> None:
    if not T > 0.0:
        raise ValueError(f"duration T must be > 0, got {T}")


def kernel_prefactor(T: float, p: DampedParams) -> complex:
    """(κ/2πiħ sinh κT)^{1/2} on the principal branch; (1/2πiħT)^{1/2} at κ = 0."""
    _check_duration(T)
    modulus = np.sqrt(float(x_csch_x(p.kappa * T)) / (2.0 * np.pi * p.hbar * T))
    return complex(_PHASE_QUARTER * modulus)


def free_kernel(bc: BoundarySpec, hbar: float = 1.0) -> complex:
    """
    Free-particle kernel (1/2πiħT)^{1/2} exp{i(x_b - x_a)²/(2ħT)}.

    Raises:
        ValueError: If T <= 0 or hbar <= 0.
    """
    _check_duration(bc.T)
    if not hbar > 0.0:
        raise ValueError(f"hbar must be > 0, got {hbar}")
    prefactor = cmath.sqrt(1.0 / (2j * cmath.pi * hbar * bc.T))
    return prefactor * cmath.exp(1j * (bc.x_b - bc.x_a) ** 2 / (2.0 * hbar * bc.T))


def kernel_values(
        x_b: ArrayLike,
        x_a: ArrayLike,
        T: float,
        p: DampedParams,
        constant_phase: bool = False,
) -> NDArray[np.complex128] | complex:
    """
    Evaluate the closed kernel directly from its printed form, vectorized.

    Λ is computed from each endpoint pair. This path does not go through
    ``quadratic_form`` so the two can be checked against each other.

    Args:
        x_b: Final positions.
        x_a: Initial positions (broadcast against x_b).
        T: Duration, T > 0.
        p: Damping parameters; κ = 0 gives the free kernel.
        constant_phase: Add the endpoint-dependent phase -κΛ²(κT/2 - tanh(κT/2)).

    Returns:
        Complex kernel values with the broadcast shape of (x_b, x_a).
    """
    _check_duration(T)
    x_b = np.asarray(x_b, dtype=float)
    x_a = np.asarray(x_a, dtype=float)
    prefactor = kernel_prefactor(T, p)

    if p.is_free:
        phase = (x_b - x_a) ** 2 / (2.0 * T)
    else:
        u = p.kappa * T
        Lambda = x_a - (x_b - x_a) / float(expm1_neg(u))
        half_tanh = np.tanh(0.5 * u)
        phase = (
            float(x_coth_x(u)) / (2.0 * T) * (x_b * x_b + x_a * x_a)
            - float(x_csch_x(u)) / T * x_b * x_a
            - p.kappa * Lambda * half_tanh * (x_b + x_a)
        )
        if constant_phase:
            phase = phase - p.kappa * Lambda * Lambda * float(x_minus_tanh_x(0.5 * u))

    out = prefactor * np.exp(1j * phase / p.hbar)
    return complex(out) if np.ndim(out) == 0 else out


def closed_kernel(bc: BoundarySpec, p: DampedParams, constant_phase: bool = False) -> complex:
    """
    Closed-form kernel K(x_b, T; x_a, 0).

    Args:
        bc: Boundary pair and duration.
        p: Damping parameters. κ = 0 dispatches to ``free_kernel``.
        constant_phase: Include the phase -κΛ²(κT/2 - tanh(κT/2)) that the
            sliced integral keeps from its completed squares.

    Returns:
        The complex amplitude.

    Raises:
        ValueError: If T <= 0.
    """
    _check_duration(bc.T)
    if p.is_free:
        return free_kernel(bc, p.hbar)
    return complex(kernel_values(bc.x_b, bc.x_a, bc.T, p, constant_phase=constant_phase))


def quadratic_form(
        T: float,
        p: DampedParams,
        Lambda: Optional[float] = None,
        constant_phase: bool = False,
) -> KernelQuadraticForm:
    """
    Expand the kernel exponent into a quadratic form in (x_a, x_b).

    With Λ substituted from the endpoints (``Lambda=None``) the source terms
    fold into the quadratic coefficients:

        c_bb = κ/(2 tanh u) - κ/(1 + e^{-u})
        c_aa = c_bb + κ
        c_ab = -κ/tanh u
        c_a = c_b = 0

    With a fixed external Λ the quadratic part is the inverted-oscillator
    form and the linear slots carry c_a = c_b = -κΛ tanh(u/2).

    Args:
        T: Duration, T > 0.
        p: Damping parameters. κ = 0 returns the free form.
        Lambda: Optional fixed companion rest position.
        constant_phase: Fold in the phase -κΛ²(u/2 - tanh(u/2)).

    Returns:
        KernelQuadraticForm.
    """
    _check_duration(T)
    prefactor = kernel_prefactor(T, p)

    if p.is_free:
        half = 0.5 / T
        return KernelQuadraticForm(
            prefactor=prefactor, c_aa=half, c_bb=half, c_ab=-1.0 / T, hbar=p.hbar,
        )

    kappa = p.kappa
    u = kappa * T
    diag = float(x_coth_x(u)) / (2.0 * T)
    weight = kappa * float(x_minus_tanh_x(0.5 * u))

    if Lambda is not None:
        linear = -kappa * Lambda * float(np.tanh(0.5 * u))
        form = KernelQuadraticForm(
            prefactor=prefactor,
            c_aa=diag,
            c_bb=diag,
            c_ab=-float(x_csch_x(u)) / T,
            c_a=linear,
            c_b=linear,
            hbar=p.hbar,
        )
        if constant_phase:
            form = replace(form, constant=-weight * Lambda * Lambda)
        return form

    c_bb = diag - kappa / (1.0 + np.exp(-u))
    c_aa = diag + kappa / (1.0 + np.exp(u))
    c_ab = -float(x_coth_x(u)) / T

    if constant_phase:
        # Λ = (1 + g)x_a - g x_b with g = 1/(e^{-u} - 1)
        g = 1.0 / float(expm1_neg(u))
        c_aa -= weight * (1.0 + g) ** 2
        c_bb -= weight * g * g
        c_ab += 2.0 * weight * g * (1.0 + g)

    return KernelQuadraticForm(
        prefactor=prefactor, c_aa=float(c_aa), c_bb=float(c_bb), c_ab=float(c_ab), hbar=p.hbar,
    )


def composition_defect(
        T1: float,
        T2: float,
        p: DampedParams,
        grid: Sequence[float],
        constant_phase: bool = False,
) -> float:
    """
    Chapman-Kolmogorov defect of the closed kernel, measured not enforced.

    ∫K(x_b, T2; y, 0) K(y, T1; x_a, 0) dy is done exactly as a Fresnel integral
    of the two quadratic forms and compared with K(x_b, T1 + T2; x_a, 0) over
    all endpoint pairs drawn from ``grid``.

    Returns:
        max |K_composed - K_direct| / |K_direct| over the grid (≈ 0 for κ = 0).

    Raises:
        ValueError: If the combined quadratic coefficient of y vanishes.
    """
    second = quadratic_form(T2, p, constant_phase=constant_phase)
    first = quadratic_form(T1, p, constant_phase=constant_phase)
    direct = quadratic_form(T1 + T2, p, constant_phase=constant_phase)

    A = second.c_aa + first.c_bb
    if abs(A) < 1e-300:
        raise ValueError("composition integral is degenerate (vanishing y² coefficient)")

    xs = np.asarray(grid, dtype=float)
    x_b, x_a = np.meshgrid(xs, xs, indexing="ij")
    B = second.c_ab * x_b + first.c_ab * x_a

    hbar = p.hbar
    gauss = cmath.sqrt(1j * cmath.pi * hbar / A)
    composed_phase = second.c_bb * x_b * x_b + first.c_aa * x_a * x_a - B * B / (4.0 * A)
    composed = second.prefactor * first.prefactor * gauss * np.exp(1j * composed_phase / hbar)
    reference = direct.evaluate(x_b, x_a)

    defect = float(np.max(np.abs(composed - reference) / np.abs(reference)))
    logger.info("composition defect T1=%.4g T2=%.4g kappa=%.4g: %.3e", T1, T2, p.kappa, defect)
    return defect
