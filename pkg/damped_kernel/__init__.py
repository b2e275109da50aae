"""damped-kernel package exports."""

__version__ = "1.0.0"

from damped_kernel.classical.core import BoundarySpec, DampedParams, InitialCondition
from damped_kernel.config import ConfigError, RunConfig, load_config
from damped_kernel.kernel.propagator import closed_kernel
from damped_kernel.slicing.discrete import discrete_kernel
from damped_kernel.wavepacket.packet import GaussianPacket, evolve_analytic

__all__ = [
    "BoundarySpec",
    "DampedParams",
    "InitialCondition",
    "ConfigError",
    "RunConfig",
    "load_config",
    "closed_kernel",
    "discrete_kernel",
    "GaussianPacket",
    "evolve_analytic",
]
