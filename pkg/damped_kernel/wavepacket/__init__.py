"""Gaussian wave-packet evolution and its quadrature cross-check."""

from damped_kernel.wavepacket.packet import (
    EvolvedPacket,
    GaussianPacket,
    NonConvergentIntegralError,
    evolve_analytic,
)
from damped_kernel.wavepacket.quadrature import (
    QuadratureGrid,
    UnderResolvedGridError,
    evolve_quadrature,
)

__all__ = [
    "EvolvedPacket",
    "GaussianPacket",
    "NonConvergentIntegralError",
    "QuadratureGrid",
    "UnderResolvedGridError",
    "evolve_analytic",
    "evolve_quadrature",
]
