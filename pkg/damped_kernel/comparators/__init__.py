"""Competing quantizations of the damped free particle."""

from damped_kernel.comparators.methods import MethodId, ObservableSet, observables

__all__ = ["MethodId", "ObservableSet", "observables"]
