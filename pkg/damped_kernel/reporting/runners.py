"""
Experiment runners behind the CLI subcommands.

Each runner turns a RunConfig into a ResultTable. Grid points are mapped over
a thread pool with ``Executor.map``, which returns results in input order, so
the row order (and therefore the output bytes) never depends on scheduling.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from itertools import product
from typing import Any, Callable, Dict, Iterable, List, Sequence, TypeVar

import numpy as np

from damped_kernel.classical.core import BoundarySpec, companion_from_boundary
from damped_kernel.comparators.methods import (
    MethodId,
    asymptote,
    max_velocity_gap,
    observables,
    reliability_interval,
    velocity_zero,
)
from damped_kernel.config import ConfigError, RunConfig
from damped_kernel.kernel.propagator import closed_kernel
from damped_kernel.numerics.convergence import fit_order, relative_error, richardson_extrapolate
from damped_kernel.reporting.invariants import run_invariants
from damped_kernel.reporting.results import ResultTable
from damped_kernel.slicing.closed_form import closed_form_table, omega_limit
from damped_kernel.slicing.coefficients import run_recursion, short_time_coeffs
from damped_kernel.slicing.discrete import discrete_kernel
from damped_kernel.wavepacket.packet import (
    GaussianPacket,
    evolve_analytic,
    mean_position,
    mean_velocity,
    mean_velocity_derivative,
    theta1_printed,
    velocity_zero_crossing,
)
from damped_kernel.wavepacket.quadrature import QuadratureGrid, evolve_quadrature, relative_l2

logger = logging.getLogger(__name__)

T_ = TypeVar("T_")
R_ = TypeVar("R_")

TOLERANCES = {
    "kernel_convergence_rel": 1e-3,
    "consistency_identity_rel": 1e-12,
    "closed_form_agreement_rel": 1e-10,
    "oracle_l2_rel": 1e-6,
    "gaussian_fit_residual": 1e-6,
}

# Errors below this are treated as converged to rounding; no order is fitted
ROUNDING_FLOOR = 1e-12

CHECK_RUNTIME_BUDGET_S = 60.0


def ordered_map(fn: Callable[[T_], R_], items: Iterable[T_], workers: int) -> List[R_]:
    """Map ``fn`` over ``items`` with a worker pool, keeping input order."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    logger.debug("mapping %d grid points over %d workers", len(items), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _base_metadata(cfg: RunConfig) -> Dict[str, Any]:
    return {"config": cfg.to_dict(), "tolerances": dict(TOLERANCES)}


def run_kernel(cfg: RunConfig) -> ResultTable:
    """Re K, Im K and |K| of the closed kernel over the (T, x_a, x_b) grid."""
    p = cfg.params
    points = list(product(cfg.grid.T, cfg.grid.x_a, cfg.grid.x_b))

    def evaluate(point):
        T, xa, xb = point
        K = closed_kernel(BoundarySpec(xa, xb, T), p)
        return T, xa, xb, K.real, K.imag, abs(K)

    table = ResultTable(
        name="kernel",
        columns=["T", "x_a", "x_b", "re_K", "im_K", "abs_K"],
        metadata=_base_metadata(cfg),
    )
    for row in ordered_map(evaluate, points, cfg.workers):
        table.add_row(row)
    table.metadata["kernel"] = "free" if p.is_free else "damped closed form"
    return table


def _max_scaled_deviation(measured: np.ndarray, reference: np.ndarray) -> float:
    scale = float(np.max(np.abs(reference)))
    if scale == 0.0:
        return float(np.max(np.abs(measured)))
    return float(np.max(np.abs(measured - reference))) / scale


def _converge_point(cfg: RunConfig, bc: BoundarySpec, N: int) -> Dict[str, Any]:
    p = cfg.params
    eps = bc.T / N
    Lambda = 0.0 if p.is_free else companion_from_boundary(bc, p).Lambda

    K_N = discrete_kernel(bc, p, N, seed=cfg.seed, include_omega=cfg.include_omega)
    reference = closed_kernel(bc, p, constant_phase=cfg.include_omega)

    trace = run_recursion(short_time_coeffs(p, eps, Lambda, seed=cfg.seed), N)
    table = closed_form_table(N, p, eps, Lambda)
    deviation = max(
        _max_scaled_deviation(trace.a, table.a),
        _max_scaled_deviation(trace.b, table.b),
        _max_scaled_deviation(trace.R, table.R),
        _max_scaled_deviation(trace.S, table.S),
    )
    return {
        "K_N": K_N,
        "error": relative_error(K_N, reference),
        "deviation": deviation,
        "omega_sum": trace.omega_total(),
        "omega_limit": omega_limit(bc.T, p, Lambda),
        "Lambda": Lambda,
    }


def run_converge(cfg: RunConfig) -> ResultTable:
    """
    Discrete-vs-closed kernel error for each N of the N list.

    The reference is the closed kernel with the constant phase when the
    remainder sum is kept (``include_omega``), without it otherwise, so the
    two sides always describe the same limit.
    """
    p = cfg.params
    points = list(product(cfg.grid.T, cfg.grid.x_a, cfg.grid.x_b, cfg.grid.N))

    def evaluate(point):
        T, xa, xb, N = point
        return _converge_point(cfg, BoundarySpec(xa, xb, T), N)

    results = ordered_map(evaluate, points, cfg.workers)

    table = ResultTable(
        name="converge",
        columns=[
            "T", "x_a", "x_b", "N", "epsilon", "re_K_N", "im_K_N", "rel_error",
            "coeff_deviation", "omega_sum", "omega_limit",
        ],
        metadata=_base_metadata(cfg),
    )
    for (T, xa, xb, N), res in zip(points, results):
        table.add_row((
            T, xa, xb, N, T / N, res["K_N"].real, res["K_N"].imag, res["error"],
            res["deviation"], res["omega_sum"], res["omega_limit"],
        ))

    fits = []
    for T, xa, xb in product(cfg.grid.T, cfg.grid.x_a, cfg.grid.x_b):
        chunk = [
            res for (t, a, b, _), res in zip(points, results) if (t, a, b) == (T, xa, xb)
        ]
        steps = [T / N for N in cfg.grid.N]
        errors = [res["error"] for res in chunk]
        omega_errors = [abs(res["omega_sum"] - res["omega_limit"]) for res in chunk]
        fits.append({
            "T": T,
            "x_a": xa,
            "x_b": xb,
            "kernel_order": _safe_order(steps, errors),
            "omega_order": _safe_order(steps, omega_errors),
            "error_strictly_decreasing": all(b < a for a, b in zip(errors, errors[1:])),
            "extrapolated_rel_error": _extrapolated_error(cfg, T, xa, xb, chunk),
            # |1 - e^{-iΩ∞/ħ}|: gap between the sliced limit and the bare closed form
            "bare_phase_gap": abs(1.0 - np.exp(-1j * chunk[0]["omega_limit"] / p.hbar)),
        })
    table.metadata["fits"] = fits
    table.metadata["seed"] = cfg.seed
    table.metadata["include_omega"] = cfg.include_omega
    return table


def _extrapolated_error(cfg: RunConfig, T: float, xa: float, xb: float,
                       chunk: Sequence[Dict[str, Any]]):
    """Error of the Richardson-extrapolated kernel from the two finest N (equal N ratios only)."""
    Ns = list(cfg.grid.N)
    if len(Ns) < 2:
        return None
    ratio = Ns[-1] / Ns[-2]
    if not np.isclose(ratio, Ns[1] / Ns[0]):
        return None
    extrapolated = richardson_extrapolate([chunk[-2]["K_N"], chunk[-1]["K_N"]], p=2, r=ratio)
    reference = closed_kernel(BoundarySpec(xa, xb, T), cfg.params, constant_phase=cfg.include_omega)
    return relative_error(extrapolated, reference)


def _safe_order(steps: Sequence[float], errors: Sequence[float]):
    if len(errors) < 2 or max(errors) < ROUNDING_FLOOR:
        return None
    try:
        return fit_order(steps, errors)
    except ValueError:
        return None


def _oracle_grid(cfg: RunConfig, pkt: GaussianPacket, T: float) -> QuadratureGrid:
    grid = QuadratureGrid.for_packet(pkt, T, cfg.params, order=cfg.oracle_order)
    if cfg.oracle_panels is None:
        return grid
    return QuadratureGrid(
        q_half_width=grid.q_half_width,
        panels=cfg.oracle_panels,
        x_min=grid.x_min,
        x_max=grid.x_max,
        n_x=grid.n_x,
        order=cfg.oracle_order,
    )


def run_evolve(cfg: RunConfig) -> ResultTable:
    """
    Time series of packet observables.

    θ₁ columns are empty at T = 0, where the packet is the initial one and
    only the full Gaussian coefficient (= θ₀) is defined. With the oracle
    flag the quadrature deltas are appended.

    Raises:
        UnderResolvedGridError: If a configured oracle grid is too coarse.
    """
    p = cfg.params
    v0 = cfg.packet.v0
    theta0 = complex(cfg.packet.theta0)
    pkt = GaussianPacket.normalized(theta0, v0)

    columns = [
        "T", "mean_x", "mean_v", "dmean_x_dT", "re_theta1", "im_theta1", "theta2",
        "re_coefficient", "im_coefficient", "norm", "re_theta1_printed", "im_theta1_printed",
        "theta1_discrepancy",
    ]
    if cfg.oracle:
        columns += ["oracle_l2", "oracle_center_delta", "oracle_fit_residual", "oracle_norm"]

    def evaluate(T: float):
        row: List[Any] = [T, mean_position(T, p, v0), mean_velocity(T, p, v0),
                          mean_velocity_derivative(T, p, v0)]
        if T == 0.0:
            row += [None, None, None, theta0.real, theta0.imag, 1.0, None, None, None]
            if cfg.oracle:
                row += [None, None, None, None]
            return row, None

        evolved = evolve_analytic(pkt, T, p)
        printed = theta1_printed(T, p, theta0)
        coef = evolved.gaussian_coefficient
        discrepancy = abs(printed - evolved.theta1) / abs(evolved.theta1)
        row += [
            evolved.theta1.real, evolved.theta1.imag, evolved.residual_phase,
            coef.real, coef.imag, evolved.norm, printed.real, printed.imag, discrepancy,
        ]
        if cfg.oracle:
            sampled = evolve_quadrature(pkt, T, p, grid=_oracle_grid(cfg, pkt, T))
            fit = sampled.gaussian_fit()
            row += [
                relative_l2(sampled, evolved.wavefunction(sampled.x)),
                abs(fit.center - evolved.mean_x),
                fit.residual,
                sampled.norm(),
            ]
        return row, evolved.norm

    results = ordered_map(evaluate, cfg.grid.T, cfg.workers)

    table = ResultTable(name="evolve", columns=columns, metadata=_base_metadata(cfg))
    norms = []
    for row, norm in results:
        table.add_row(row)
        if norm is not None:
            norms.append(norm)

    meta: Dict[str, Any] = {
        "max_norm_drift": max((abs(n - 1.0) for n in norms), default=0.0),
        "max_theta1_discrepancy": max(
            (r[0][12] for r in results if r[0][12] is not None), default=None,
        ),
    }
    if not p.is_free:
        crossing = velocity_zero_crossing(p)
        meta["velocity_zero_crossing"] = crossing
        velocities = table.column("mean_v")
        times = table.column("T")
        meta["velocity_sign_change"] = next(
            ([t0, t1] for t0, t1, va, vb in zip(times, times[1:], velocities, velocities[1:])
             if va > 0.0 >= vb),
            None,
        )
    table.metadata.update(meta)
    return table


def run_compare(cfg: RunConfig) -> ResultTable:
    """⟨x⟩ and ⟨v⟩ of every selected method over the T grid."""
    p = cfg.params
    v0 = cfg.packet.v0
    alpha0 = complex(cfg.packet.theta0)
    methods = list(cfg.methods)

    columns = ["T"]
    for m in methods:
        columns += [f"mean_x_{m.value}", f"mean_v_{m.value}"]

    def evaluate(T: float):
        row: List[Any] = [T]
        for m in methods:
            obs = observables(m, T, p, v0, alpha0)
            row += [obs.mean_x, obs.mean_v]
        return row

    table = ResultTable(name="compare", columns=columns, metadata=_base_metadata(cfg))
    for row in ordered_map(evaluate, cfg.grid.T, cfg.workers):
        table.add_row(row)

    if not p.is_free:
        table.metadata["asymptotes"] = {m.value: asymptote(m, p, v0) for m in methods}
        table.metadata["reliability_intervals"] = {
            m.value: list(reliability_interval(m, p)) for m in methods
        }
        table.metadata["velocity_zeros"] = {m.value: velocity_zero(m, p) for m in methods}
        lg_end = reliability_interval(MethodId.LG, p)[1]
        table.metadata["lg_kochan_max_velocity_gap"] = max_velocity_gap(p, v0, cfg.grid.T)
        table.metadata["lg_kochan_max_velocity_gap_reliable"] = max_velocity_gap(
            p, v0, [t for t in cfg.grid.T if t <= lg_end],
        )
    return table


def run_check(cfg: RunConfig) -> ResultTable:
    """
    Run the invariant suite; one row per invariant.

    ``metadata['all_passed']`` is False when any invariant fails. The suite's
    wall time is recorded next to its budget, so unlike the other tables the
    check table is not byte-identical across runs.
    """
    table = ResultTable(
        name="check",
        columns=["invariant", "module", "passed", "measured", "tolerance"],
        metadata=_base_metadata(cfg),
    )
    start = time.perf_counter()
    try:
        results = run_invariants(cfg.inject_fault)
    except KeyError as e:
        raise ConfigError(str(e), key="run.inject_fault") from e
    runtime = time.perf_counter() - start
    for inv, m in results:
        table.add_row((inv.name, inv.module, m.passed, m.measured, m.tolerance))

    table.metadata["all_passed"] = all(m.passed for _, m in results)
    table.metadata["failed"] = [inv.name for inv, m in results if not m.passed]
    table.metadata["runtime_s"] = runtime
    table.metadata["runtime_budget_s"] = CHECK_RUNTIME_BUDGET_S
    table.metadata["within_runtime_budget"] = runtime < CHECK_RUNTIME_BUDGET_S
    return table


RUNNERS: Dict[str, Callable[[RunConfig], ResultTable]] = {
    "kernel": run_kernel,
    "converge": run_converge,
    "evolve": run_evolve,
    "compare": run_compare,
    "check": run_check,
}
