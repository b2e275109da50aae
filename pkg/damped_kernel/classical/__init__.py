"""Classical damped motion and its companion conservative system."""

from damped_kernel.classical.core import (
    BoundarySpec,
    CompanionParams,
    DampedParams,
    InitialCondition,
    PhasePoint,
    companion_from_boundary,
    companion_from_ic,
    solve_damped,
)

__all__ = [
    "BoundarySpec",
    "CompanionParams",
    "DampedParams",
    "InitialCondition",
    "PhasePoint",
    "companion_from_boundary",
    "companion_from_ic",
    "solve_damped",
]
