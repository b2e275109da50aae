"""
Direct-quadrature oracle for packet evolution.

ψ_T(x) = ∫K(x, T; q, 0)ψ₀(q)dq is computed with composite Gauss-Legendre
panels over ±8 envelope widths of ψ₀. The integrand oscillates, so a grid is
accepted only if the worst-case phase advance between neighbouring nodes
stays below π/4. The kernel is evaluated through ``kernel_values`` (the
printed closed form), not through the quadratic form used analytically.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from numpy.polynomial import legendre
from numpy.typing import NDArray
from scipy import integrate

from damped_kernel.classical.core import DampedParams
from damped_kernel.kernel.propagator import kernel_values, quadratic_form
from damped_kernel.wavepacket.packet import GaussianPacket, evolve_analytic

logger = logging.getLogger(__name__)

ENVELOPE_WIDTHS = 8.0
MAX_PHASE_STEP = np.pi / 4.0
TARGET_PHASE_STEP = np.pi / 8.0
DEFAULT_ORDER = 20
DEFAULT_NX = 401

# Fit mask: keep points with density above this fraction of the peak
FIT_FLOOR = 1e-8


class UnderResolvedGridError(ValueError):
    """Raised when a quadrature grid cannot resolve the integrand's phase."""

    def __init__(self, message: str, phase_step: float, required_panels: int):
        super().__init__(message)
        self.phase_step = phase_step
        self.required_panels = required_panels


@dataclass(frozen=True)
class QuadratureGrid:
    """
    Composite Gauss-Legendre grid in q and an evaluation grid in x.

    q runs over [-q_half_width, q_half_width] in ``panels`` equal panels of
    ``order`` nodes; x is uniform on [x_min, x_max] with ``n_x`` points.
    """

    q_half_width: float
    panels: int
    x_min: float
    x_max: float
    n_x: int = DEFAULT_NX
    order: int = DEFAULT_ORDER

    def __post_init__(self) -> None:
        if not self.q_half_width > 0.0:
            raise ValueError("q_half_width must be > 0")
        if self.panels < 1 or self.order < 2:
            raise ValueError("need at least one panel and order >= 2")
        if not self.x_max > self.x_min or self.n_x < 3:
            raise ValueError("x range must be non-empty with at least 3 points")

    @property
    def panel_width(self) -> float:
        return 2.0 * self.q_half_width / self.panels

    @property
    def node_step(self) -> float:
        """Largest spacing between Gauss-Legendre nodes, about hπ/(2·order)."""
        return self.panel_width * np.pi / (2.0 * self.order)

    def nodes(self) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Nodes and weights in fixed panel order."""
        t, w = legendre.leggauss(self.order)
        h = self.panel_width
        left = -self.q_half_width + h * np.arange(self.panels)
        q = (left[:, None] + 0.5 * h * (t[None, :] + 1.0)).ravel()
        weights = np.tile(0.5 * h * w, self.panels)
        return q, weights

    def x_values(self) -> NDArray[np.float64]:
        return np.linspace(self.x_min, self.x_max, self.n_x)

    def phase_gradient(self, pkt: GaussianPacket, T: float, p: DampedParams) -> float:
        """Upper bound of |d/dq phase| of K(x, T; q, 0)ψ₀(q) over the grid."""
        form = quadratic_form(T, p)
        Q = self.q_half_width
        X = max(abs(self.x_min), abs(self.x_max))
        return (
            (2.0 * abs(form.c_aa) * Q + abs(form.c_ab) * X + abs(pkt.v0)) / p.hbar
            + 2.0 * abs(complex(pkt.theta).imag) * Q
        )

    def validate(self, pkt: GaussianPacket, T: float, p: DampedParams) -> float:
        """
        Check the phase resolution and return the phase advance per node.

        Raises:
            UnderResolvedGridError: If the advance exceeds π/4.
        """
        gradient = self.phase_gradient(pkt, T, p)
        phase_step = gradient * self.node_step
        if phase_step > MAX_PHASE_STEP:
            required = int(np.ceil(self.panels * phase_step / TARGET_PHASE_STEP))
            raise UnderResolvedGridError(
                f"quadrature grid under-resolved: phase advance {phase_step:.3f} rad per node "
                f"exceeds pi/4; use at least {required} panels of order {self.order}",
                phase_step=phase_step,
                required_panels=required,
            )
        return phase_step

    @classmethod
    def for_packet(
            cls,
            pkt: GaussianPacket,
            T: float,
            p: DampedParams,
            order: int = DEFAULT_ORDER,
            n_x: int = DEFAULT_NX,
    ) -> "QuadratureGrid":
        """Size a grid that resolves the packet at time T with phase step about π/8."""
        q_half = ENVELOPE_WIDTHS * pkt.envelope_width()
        evolved = evolve_analytic(pkt, T, p)
        width_T = 1.0 / np.sqrt(2.0 * evolved.theta1.real)
        x_min = evolved.mean_x - ENVELOPE_WIDTHS * width_T
        x_max = evolved.mean_x + ENVELOPE_WIDTHS * width_T

        # x spacing keeps the output phase step below π/4 so it can be unwrapped
        X = max(abs(x_min), abs(x_max))
        coef = evolved.gaussian_coefficient
        x_gradient = 2.0 * abs(coef.imag) * X + 2.0 * abs(evolved.theta1.imag * evolved.mean_x)
        n_x = max(n_x, int(np.ceil((x_max - x_min) * x_gradient / MAX_PHASE_STEP)) + 1)

        probe = cls(q_half_width=q_half, panels=1, x_min=x_min, x_max=x_max, n_x=n_x, order=order)
        gradient = probe.phase_gradient(pkt, T, p)
        per_panel = 2.0 * q_half * np.pi / (2.0 * order)
        panels = max(1, int(np.ceil(gradient * per_panel / TARGET_PHASE_STEP)))
        return cls(q_half_width=q_half, panels=panels, x_min=x_min, x_max=x_max, n_x=n_x, order=order)


@dataclass(frozen=True)
class GaussianFit:
    center: float
    gaussian_coefficient: complex
    theta1: Optional[complex]
    residual: float


@dataclass(frozen=True)
class SampledWavefunction:
    """ψ_T sampled on a uniform x grid."""

    x: NDArray[np.float64]
    psi: NDArray[np.complex128]
    T: float
    hbar: float = 1.0
    phase_step: float = 0.0

    def density(self) -> NDArray[np.float64]:
        return np.abs(self.psi) ** 2

    def norm(self) -> float:
        """∫|ψ_T|²dx by Simpson's rule."""
        return float(integrate.simpson(self.density(), x=self.x))

    def gaussian_fit(self) -> GaussianFit:
        """
        Least-squares Gaussian fit of ψ_T.

        Quadratics are fitted to log|ψ| and to the unwrapped phase over the
        points where the density exceeds ``FIT_FLOOR`` of its peak. The
        residual is the relative L² misfit of the density.
        """
        rho = self.density()
        mask = rho > FIT_FLOOR * rho.max()
        x = self.x[mask]
        psi = self.psi[mask]
        weights = np.abs(psi) / np.abs(psi).max()

        log_mod = np.polyfit(x, np.log(np.abs(psi)), 2, w=weights)
        phase = np.polyfit(x, np.unwrap(np.angle(psi)), 2, w=weights)

        re_theta = -log_mod[0]
        center = log_mod[1] / (2.0 * re_theta)
        coefficient = complex(re_theta, -phase[0])
        theta1 = complex(re_theta, phase[1] / (2.0 * center)) if abs(center) > 1e-12 else None

        fitted = np.exp(2.0 * np.polyval(log_mod, self.x))
        residual = float(np.linalg.norm(fitted - rho) / np.linalg.norm(rho))
        return GaussianFit(center=float(center), gaussian_coefficient=coefficient, theta1=theta1, residual=residual)


def evolve_quadrature(
        pkt: GaussianPacket,
        T: float,
        p: DampedParams,
        grid: Optional[QuadratureGrid] = None,
        constant_phase: bool = False,
) -> SampledWavefunction:
    """
    Propagate ψ₀ by direct quadrature of the closed kernel.

    Args:
        pkt: Initial packet.
        T: Duration, T > 0.
        p: Damping parameters.
        grid: Optional grid; sized by ``QuadratureGrid.for_packet`` when omitted.
        constant_phase: Use the kernel that keeps the sliced constant phase.

    Returns:
        SampledWavefunction on the grid's x points.

    Raises:
        UnderResolvedGridError: If the grid cannot resolve the integrand.
    """
    if not T > 0.0:
        raise ValueError(f"duration T must be > 0, got {T}")
    if grid is None:
        grid = QuadratureGrid.for_packet(pkt, T, p)
    phase_step = grid.validate(pkt, T, p)

    q, w = grid.nodes()
    x = grid.x_values()
    weighted = w * pkt.wavefunction(q, p.hbar)
    K = kernel_values(x[:, None], q[None, :], T, p, constant_phase=constant_phase)
    psi = K @ weighted

    logger.debug(
        "quadrature T=%.6g: %d nodes, %d x points, phase step %.3f rad",
        T, q.size, x.size, phase_step,
    )
    return SampledWavefunction(x=x, psi=np.asarray(psi), T=T, hbar=p.hbar, phase_step=phase_step)


def relative_l2(sampled: SampledWavefunction, reference: NDArray[np.complex128]) -> float:
    """sqrt(∫|ψ - ψ_ref|² / ∫|ψ_ref|²) on the sampled grid."""
    diff = integrate.simpson(np.abs(sampled.psi - reference) ** 2, x=sampled.x)
    ref = integrate.simpson(np.abs(reference) ** 2, x=sampled.x)
    return float(np.sqrt(diff / ref))
