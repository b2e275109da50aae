"""Closed-form propagator."""

from damped_kernel.kernel.propagator import (
    KernelQuadraticForm,
    closed_kernel,
    composition_defect,
    free_kernel,
    quadratic_form,
)

__all__ = [
    "KernelQuadraticForm",
    "closed_kernel",
    "composition_defect",
    "free_kernel",
    "quadratic_form",
]
