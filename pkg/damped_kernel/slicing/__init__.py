"""Time-sliced path integral: coefficient recursion, closed forms, discrete kernel."""

from damped_kernel.slicing.closed_form import closed_form_table, omega_limit, omega_sum
from damped_kernel.slicing.coefficients import (
    ConsistencyError,
    RecursionTrace,
    SliceCoefficients,
    SliceDegeneracyError,
    SliceGrid,
    recursion_step,
    run_recursion,
    short_time_coeffs,
)
from damped_kernel.slicing.discrete import discrete_kernel

__all__ = [
    "ConsistencyError",
    "RecursionTrace",
    "SliceCoefficients",
    "SliceDegeneracyError",
    "SliceGrid",
    "closed_form_table",
    "discrete_kernel",
    "omega_limit",
    "omega_sum",
    "recursion_step",
    "run_recursion",
    "short_time_coeffs",
]
