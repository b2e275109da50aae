"""Overflow-safe hyperbolic helpers and convergence-order tools."""
