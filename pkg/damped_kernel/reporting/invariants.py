"""
Invariant suite executed by ``run_check``.

Each check runs at standard parameters (κ = 0.6, T = 1, ħ = 1, v₀ = 5,
θ₀ = 1/2) and returns a ``Measurement``. With ``fault=True`` a check
perturbs its own input so that the comparison fails; the test suite uses
this to prove that each check can actually fail.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List

import numpy as np
from scipy import optimize

from damped_kernel.classical.core import (
    BoundarySpec,
    DampedParams,
    InitialCondition,
    PhasePoint,
    companion_energy,
    companion_from_boundary,
    companion_from_ic,
    companion_stiffness,
    solve_damped,
    stationarity_residual,
)
from damped_kernel.comparators.methods import (
    MethodId,
    asymptote,
    observables,
    reliability_interval,
    velocity_zero,
)
from damped_kernel.kernel.propagator import (
    closed_kernel,
    free_kernel,
    kernel_values,
    quadratic_form,
)
from damped_kernel.numerics.convergence import fit_order, relative_error
from damped_kernel.slicing.closed_form import (
    closed_form_table,
    omega_limit,
    omega_sum,
    source_limit,
)
from damped_kernel.slicing.coefficients import run_recursion, short_time_coeffs
from damped_kernel.slicing.discrete import discrete_kernel
from damped_kernel.wavepacket.packet import (
    GaussianPacket,
    evolve_analytic,
    initial_slope,
    mean_position,
    mean_velocity,
    velocity_zero_crossing,
)
from damped_kernel.wavepacket.quadrature import SampledWavefunction, evolve_quadrature, relative_l2

logger = logging.getLogger(__name__)

STANDARD = DampedParams(kappa=0.6, hbar=1.0)
V0 = 5.0
THETA0 = 0.5


@dataclass(frozen=True)
class Measurement:
    passed: bool
    measured: float
    tolerance: float


@dataclass(frozen=True)
class Invariant:
    name: str
    module: str
    check: Callable[[bool], Measurement]


REGISTRY: Dict[str, Invariant] = {}


def invariant(name: str, module: str):
    """Register a check under ``name``."""

    def decorator(fn: Callable[[bool], Measurement]) -> Callable[[bool], Measurement]:
        if name in REGISTRY:
            raise ValueError(f"invariant {name!r} registered twice")
        REGISTRY[name] = Invariant(name=name, module=module, check=fn)
        return fn

    return decorator


def _below(measured: float, tolerance: float) -> Measurement:
    measured = float(measured)
    return Measurement(passed=bool(measured <= tolerance), measured=measured, tolerance=tolerance)


# classical_core

@invariant("phase_curve_coincidence", "classical_core")
def _phase_curve(fault: bool) -> Measurement:
    t = np.linspace(0.0, 10.0, 201)
    worst = 0.0
    for x0, v0, kappa in [(0.0, 5.0, 0.6), (1.5, -2.0, 1.3), (-3.0, 0.7, 0.05)]:
        ic = InitialCondition(x0, v0)
        p = DampedParams(kappa)
        c = companion_from_ic(ic, p)
        trajectory = None
        if fault:
            def trajectory(tt, c=c, p=p):
                return c.trajectory(tt, p) + 0.01 * tt, c.acceleration(tt, p)
        scale = max(abs(c.Lambda), abs(c.eta), 1.0) * kappa ** 2
        worst = max(worst, stationarity_residual(ic, p, t, trajectory) / scale)
    return _below(worst, 1e-12)


@invariant("constructor_consistency", "classical_core")
def _constructors(fault: bool) -> Measurement:
    bc = BoundarySpec(x_a=0.0, x_b=1.0, T=1.0)
    p = STANDARD
    target = bc.x_b + (1e-3 if fault else 0.0)

    def miss(v: float) -> float:
        return solve_damped(InitialCondition(bc.x_a, v), p, bc.T).x - target

    v = optimize.brentq(miss, -100.0, 100.0, xtol=1e-15, rtol=1e-15)
    shot = companion_from_ic(InitialCondition(bc.x_a, v), p)
    direct = companion_from_boundary(bc, p)
    deviation = max(
        relative_error(shot.Lambda, direct.Lambda),
        relative_error(shot.eta, direct.eta),
    )
    return _below(deviation, 1e-9)


@invariant("negative_stiffness", "classical_core")
def _stiffness(fault: bool) -> Measurement:
    worst = max(companion_stiffness(DampedParams(k)) for k in (1e-6, 0.05, 0.6, 3.0, 50.0))
    if fault:
        worst = -worst
    return Measurement(passed=worst < 0.0, measured=worst, tolerance=0.0)


@invariant("companion_energy_conservation", "classical_core")
def _energy(fault: bool) -> Measurement:
    ic = InitialCondition(0.0, V0)
    p = STANDARD
    c = companion_from_ic(ic, p)
    if fault:
        c = type(c)(Lambda=c.Lambda * (1.0 + 1e-3), eta=c.eta)
    energies = []
    for t in np.linspace(0.0, 8.0, 81):
        state = solve_damped(ic, p, float(t))
        energies.append(companion_energy(PhasePoint(state.x, state.v), c, p))
    scale = 0.5 * V0 ** 2
    return _below((max(energies) - min(energies)) / scale, 1e-10)


# slicing_engine

@invariant("consistency_identity", "slicing_engine")
def _consistency(fault: bool) -> Measurement:
    base = short_time_coeffs(STANDARD, 1e-4, 1.0)
    if fault:
        base = type(base)(base.a, base.b, base.R, base.S, base.Omega, base.gap * (1.0 + 1e-6) + 1e-3)
    trace = run_recursion(base, 10_001, check=False)
    if fault:
        # measure against the seed's true gap
        true_gap = short_time_coeffs(STANDARD, 1e-4, 1.0).gap
        a0 = trace.a[0]
        defects = np.abs((trace.a - trace.b) * (trace.a + trace.b) - true_gap) / (a0 * a0)
    else:
        defects = trace.consistency_defects()
    return _below(np.max(defects), 1e-12)


@invariant("closed_form_agreement", "slicing_engine")
def _closed_form(fault: bool) -> Measurement:
    eps = 1e-4
    n = 10_001
    trace = run_recursion(short_time_coeffs(STANDARD, eps, 1.0), n)
    table = closed_form_table(n, STANDARD, eps * (1.0 + 1e-8) if fault else eps, 1.0)
    deviation = max(
        np.max(np.abs(trace.a - table.a) / table.a),
        np.max(np.abs(trace.b - table.b) / table.b),
    )
    return _below(deviation, 1e-10)


@invariant("source_term_limits", "slicing_engine")
def _source_limits(fault: bool) -> Measurement:
    N, T, Lambda = 100_000, 1.0, 1.0
    trace = run_recursion(short_time_coeffs(STANDARD, T / N, Lambda), N)
    limit = source_limit(T, STANDARD, Lambda * (1.0 + 1e-3 if fault else 1.0))
    deviation = max(relative_error(trace.R[-1], limit), relative_error(trace.S[-1], limit))
    return _below(deviation, 1e-4)


@invariant("omega_sum_order", "slicing_engine")
def _omega_order(fault: bool) -> Measurement:
    T, Lambda = 1.0, 1.0
    limit = omega_limit(T, STANDARD, Lambda) * (1.0 + 1e-3 if fault else 1.0)
    Ns = [100, 200, 400, 800, 1600]
    errors = [abs(omega_sum(N, STANDARD, T / N, Lambda) - limit) for N in Ns]
    order = fit_order([T / N for N in Ns], errors)
    return _below(abs(order - 2.0), 0.2)


# kernel

@invariant("discrete_kernel_convergence", "kernel")
def _discrete(fault: bool) -> Measurement:
    bc = BoundarySpec(0.0, 1.0, 1.0)
    reference = closed_kernel(bc, STANDARD, constant_phase=not fault)
    Ns = [1250, 2500, 5000, 10_000]
    errors = [relative_error(discrete_kernel(bc, STANDARD, N), reference) for N in Ns]
    order = fit_order([bc.T / N for N in Ns], errors)
    ok = errors[-1] < 1e-3 and order >= 1.0
    return Measurement(passed=bool(ok), measured=float(errors[-1]), tolerance=1e-3)


@invariant("free_reduction", "kernel")
def _free(fault: bool) -> Measurement:
    p = DampedParams(kappa=1e-3 if fault else 1e-8)
    xs = np.linspace(-2.0, 2.0, 9)
    worst = 0.0
    for T in (0.5, 1.0, 2.0):
        for xa in xs:
            for xb in xs:
                bc = BoundarySpec(float(xa), float(xb), T)
                worst = max(worst, relative_error(closed_kernel(bc, p), free_kernel(bc)))
    return _below(worst, 1e-6)


@invariant("prefactor_modulus", "kernel")
def _modulus(fault: bool) -> Measurement:
    xs = np.linspace(-2.0, 2.0, 9)
    xb, xa = np.meshgrid(xs, xs, indexing="ij")
    worst = 0.0
    for T in (0.5, 1.0, 2.0):
        u = STANDARD.kappa * T
        expected = math.sqrt(STANDARD.kappa / (2.0 * math.pi * STANDARD.hbar * math.sinh(u)))
        values = kernel_values(xb, xa, T * (1.01 if fault else 1.0), STANDARD)
        worst = max(worst, float(np.max(np.abs(np.abs(values) - expected))) / expected)
    return _below(worst, 1e-13)


@invariant("quadratic_form_roundtrip", "kernel")
def _roundtrip(fault: bool) -> Measurement:
    xs = np.linspace(-2.0, 2.0, 9)
    xb, xa = np.meshgrid(xs, xs, indexing="ij")
    worst = 0.0
    for T in (0.5, 1.0, 2.0):
        form = quadratic_form(T, STANDARD)
        if fault:
            form = type(form)(form.prefactor, form.c_aa, form.c_aa, form.c_ab, hbar=form.hbar)
        direct = kernel_values(xb, xa, T, STANDARD)
        worst = max(worst, float(np.max(np.abs(form.evaluate(xb, xa) - direct) / np.abs(direct))))
    return _below(worst, 1e-13)


# wavepacket

def _packet() -> GaussianPacket:
    return GaussianPacket.normalized(THETA0, V0)


@invariant("oracle_agreement", "wavepacket")
def _oracle(fault: bool) -> Measurement:
    worst = 0.0
    for T in (0.5, 1.0, 1.469):
        sampled = evolve_quadrature(_packet(), T, STANDARD)
        reference_packet = GaussianPacket.normalized(THETA0, V0 * (1.0 + 1e-3) if fault else V0)
        analytic = evolve_analytic(reference_packet, T, STANDARD)
        worst = max(worst, relative_l2(sampled, analytic.wavefunction(sampled.x)))
    return _below(worst, 1e-6)


@invariant("gaussian_closure", "wavepacket")
def _closure(fault: bool) -> Measurement:
    worst = 0.0
    for T in (0.5, 1.0, 1.469):
        sampled = evolve_quadrature(_packet(), T, STANDARD)
        if fault:
            bump = 1e-2 * np.max(np.abs(sampled.psi)) * np.exp(-((sampled.x - sampled.x.mean()) ** 2))
            sampled = SampledWavefunction(x=sampled.x, psi=sampled.psi + bump, T=T)
        worst = max(worst, sampled.gaussian_fit().residual)
    return _below(worst, 1e-6)


@invariant("reference_regime_values", "wavepacket")
def _reference_regime(fault: bool) -> Measurement:
    v0 = V0 * (1.0 + 1e-3) if fault else V0
    dx = abs(mean_position(1.0, STANDARD, v0) - 4.475413)
    dv = abs(mean_velocity(1.0, STANDARD, v0) - 1.53251)
    measured = max(dx / 5e-7, dv / 5e-6)
    return _below(measured, 1.0)


@invariant("velocity_zero_crossing", "wavepacket")
def _zero(fault: bool) -> Measurement:
    p = DampedParams(0.6 * (1.0 + 1e-6)) if fault else STANDARD
    root = velocity_zero_crossing(p)
    expected = math.log(1.0 + math.sqrt(2.0)) / 0.6
    ts = np.linspace(0.0, expected, 200)
    velocities = [mean_velocity(float(t), STANDARD, V0) for t in ts]
    decreasing = all(b < a for a, b in zip(velocities, velocities[1:]))
    measured = abs(root - expected)
    return Measurement(passed=bool(decreasing and measured <= 1e-8), measured=measured, tolerance=1e-8)


@invariant("initial_slope", "wavepacket")
def _slope(fault: bool) -> Measurement:
    slope = initial_slope(STANDARD, V0, step=1e-1 if fault else 1e-6)
    return _below(relative_error(slope, V0), 1e-6)


# comparators

@invariant("asymptotes", "comparators")
def _asymptotes(fault: bool) -> Measurement:
    worst = 0.0
    for m in MethodId:
        limit = asymptote(m, STANDARD, V0) * (1.0 + 1e-3 if fault else 1.0)
        worst = max(worst, relative_error(observables(m, 40.0, STANDARD, V0).mean_x, limit))
    return _below(worst, 1e-4)


@invariant("ck_dgst_same_position", "comparators")
def _ck_dgst(fault: bool) -> Measurement:
    worst = 0.0
    for t in np.linspace(0.0, 10.0, 101):
        ck = observables(MethodId.CK, float(t), STANDARD, V0).mean_x
        dgst = observables(MethodId.DGST, float(t) * (1.001 if fault else 1.0), STANDARD, V0).mean_x
        worst = max(worst, abs(ck - dgst))
    return _below(worst, 0.0)


@invariant("initial_slopes_agree", "comparators")
def _slopes(fault: bool) -> Measurement:
    h = 1e-2 if fault else 1e-6
    worst = 0.0
    for m in MethodId:
        slope = (observables(m, h, STANDARD, V0).mean_x - observables(m, 0.0, STANDARD, V0).mean_x) / h
        worst = max(worst, relative_error(slope, V0))
    return _below(worst, 1e-6)


@invariant("velocity_zeros_in_reliability_interval", "comparators")
def _reliability(fault: bool) -> Measurement:
    worst = 0.0
    for m in (MethodId.LG, MethodId.KOCHAN):
        root = velocity_zero(m, STANDARD)
        end = reliability_interval(m, STANDARD)[1]
        worst = max(worst, abs(root - end * (1.01 if fault else 1.0)))
    return _below(worst, 1e-8)


def run_invariants(inject_fault: str | None = None) -> List[tuple[Invariant, Measurement]]:
    """
    Run every registered invariant in registration order.

    Args:
        inject_fault: Name of an invariant to perturb, or "all".

    Raises:
        KeyError: If ``inject_fault`` names no registered invariant.
    """
    if inject_fault not in (None, "all") and inject_fault not in REGISTRY:
        raise KeyError(f"no invariant named {inject_fault!r}")

    results = []
    for inv in REGISTRY.values():
        fault = inject_fault == "all" or inject_fault == inv.name
        measurement = inv.check(fault)
        logger.info(
            "invariant %s: %s (measured %.3e, tolerance %.3e)",
            inv.name, "pass" if measurement.passed else "FAIL",
            measurement.measured, measurement.tolerance,
        )
        results.append((inv, measurement))
    return results
