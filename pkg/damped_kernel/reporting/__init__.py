"""Result tables, invariant registry and experiment runners."""

from damped_kernel.reporting.results import ResultTable

__all__ = ["ResultTable"]
