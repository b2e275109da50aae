"""CLI commands that run one experiment and write its result table."""

import sys
import time
from typing import Any, Dict, Optional

import click

from damped_kernel.audit.logger import get_audit_logger
from damped_kernel.config import ConfigError, load_config
from damped_kernel.reporting.runners import RUNNERS
from damped_kernel.wavepacket.quadrature import UnderResolvedGridError

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INVARIANT = 2
EXIT_NUMERICAL = 3


def physics_options(fn):
    """Options shared by every command that evaluates the model."""
    options = [
        click.option('--config', type=click.Path(exists=True, dir_okay=False),
                     help='Config file (YAML or key=value lines)'),
        click.option('--kappa', type=float, help='Damping rate κ >= 0 [default 0.6]'),
        click.option('--hbar', type=float, help='Reduced Planck constant ħ > 0 [default 1]'),
        click.option('--format', 'fmt', type=click.Choice(['csv', 'json']),
                     help='Output format [default csv]'),
        click.option('--gnuplot', is_flag=True, default=None,
                     help='Write whitespace-separated columns for gnuplot'),
        click.option('--out', type=str,
                     help="Output path; '-' writes to stdout "
                          "[default $DAMPED_KERNEL_OUTPUT_DIR/<command>.<ext>]"),
        click.option('--workers', type=int, help='Worker threads (output order is fixed)'),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def packet_options(fn):
    options = [
        click.option('--v0', type=float, help='Initial packet velocity [default 5]'),
        click.option('--theta0', type=str,
                     help='Initial Gaussian width parameter, complex allowed [default 0.5]'),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def boundary_options(fn):
    options = [
        click.option('--xa', type=str, help='Start positions: value, list or min:max:steps'),
        click.option('--xb', type=str, help='End positions: value, list or min:max:steps'),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def time_option(fn):
    return click.option('--T', '--T-grid', 'T_grid', type=str,
                        help='Durations: value, list or min:max:steps')(fn)


def execute(command: str, config: Optional[str], overrides: Dict[str, Any]) -> None:
    """
    Resolve the configuration, run one command and write its table.

    Exits with 1 on configuration errors, 2 when an invariant fails and 3
    when a computation is refused as numerically unsafe.
    """
    try:
        cfg = load_config(command, config, overrides)
    except ConfigError as e:
        click.echo(click.style(f"✗ Configuration error: {e}", fg="red"), err=True)
        sys.exit(EXIT_CONFIG)

    audit_logger = get_audit_logger(cfg.audit)
    audit_logger.log_run_started(command, cfg.to_dict())
    to_stdout = cfg.output.path is not None and str(cfg.output.path) == "-"
    if not to_stdout:
        click.echo(click.style(f"[Running {command}]", fg="blue", bold=True), err=True)

    start = time.perf_counter()
    try:
        table = RUNNERS[command](cfg)
    except ConfigError as e:
        audit_logger.log_error("ConfigError", str(e), {"command": command})
        audit_logger.close()
        click.echo(click.style(f"✗ Configuration error: {e}", fg="red"), err=True)
        sys.exit(EXIT_CONFIG)
    except UnderResolvedGridError as e:
        audit_logger.log_numerical_refusal(
            str(e), command=command, phase_step=e.phase_step, required_panels=e.required_panels,
        )
        audit_logger.close()
        click.echo(click.style(f"✗ Refused: {e}", fg="red"), err=True)
        sys.exit(EXIT_NUMERICAL)
    except ArithmeticError as e:
        audit_logger.log_numerical_refusal(str(e), command=command, error_type=type(e).__name__)
        audit_logger.close()
        click.echo(click.style(f"✗ Refused: {e}", fg="red"), err=True)
        sys.exit(EXIT_NUMERICAL)
    elapsed = time.perf_counter() - start

    if to_stdout:
        click.echo(table.render(cfg.output.format, cfg.output.gnuplot), nl=False)
        target = "-"
    else:
        path = table.write(cfg.output.target(command), cfg.output.format, cfg.output.gnuplot)
        target = str(path)
        click.echo(click.style(f"✓ Wrote {len(table.rows)} rows to {target}", fg="green"), err=True)
        click.echo(click.style(f"  elapsed {elapsed:.3f} s", fg="cyan"), err=True)

    audit_logger.log_table_written(
        command, target, rows=len(table.rows), columns=len(table.columns), elapsed_s=elapsed,
    )

    if command == "check":
        for row in table.rows:
            name, _, passed, measured, tolerance = row
            audit_logger.log_invariant_checked(name, passed, measured, tolerance)
        failed = table.metadata.get("failed", [])
        audit_logger.close()
        if failed:
            click.echo(click.style(f"✗ {len(failed)} invariant(s) failed: {', '.join(failed)}",
                                   fg="red"), err=True)
            sys.exit(EXIT_INVARIANT)
        if not to_stdout:
            click.echo(click.style(f"✓ All {len(table.rows)} invariants hold", fg="green"),
                       err=True)
        return

    audit_logger.close()


@click.command()
@physics_options
@boundary_options
@time_option
def kernel(config, kappa, hbar, fmt, gnuplot, out, workers, xa, xb, T_grid):
    """
    Evaluate the closed-form kernel K(x_b, T; x_a, 0) on a grid.

    Example:
        damped-kernel kernel --kappa 0.6 --T 1 --xa 0 --xb -2:2:41
    """
    execute('kernel', config, {
        'kappa': kappa, 'hbar': hbar, 'format': fmt, 'gnuplot': gnuplot, 'out': out,
        'workers': workers, 'xa': xa, 'xb': xb, 'T': T_grid,
    })


@click.command()
@physics_options
@boundary_options
@time_option
@click.option('--N-list', 'N_list', type=str, help='Ascending slice counts, e.g. 125,250,500')
@click.option('--seed', type=click.Choice(['hyperbolic', 'polynomial']),
              help='Short-time coefficient seed [default hyperbolic]')
@click.option('--omega/--no-omega', 'include_omega', default=None,
              help='Keep the remainder phase sum in the sliced kernel [default on]')
def converge(config, kappa, hbar, fmt, gnuplot, out, workers, xa, xb, T_grid, N_list, seed,
             include_omega):
    """
    Compare the time-sliced kernel against the closed form as N grows.

    Example:
        damped-kernel converge --T 1 --xa 0 --xb 1 --N-list 500,1000,2000,4000
    """
    execute('converge', config, {
        'kappa': kappa, 'hbar': hbar, 'format': fmt, 'gnuplot': gnuplot, 'out': out,
        'workers': workers, 'xa': xa, 'xb': xb, 'T': T_grid, 'N_list': N_list,
        'seed': seed, 'include_omega': include_omega,
    })


@click.command()
@physics_options
@packet_options
@time_option
@click.option('--oracle', is_flag=True, default=None,
              help='Cross-check against direct quadrature of the kernel')
@click.option('--oracle-panels', type=int,
              help='Fixed number of quadrature panels (refused if too coarse)')
def evolve(config, kappa, hbar, fmt, gnuplot, out, workers, v0, theta0, T_grid, oracle,
           oracle_panels):
    """
    Evolve a Gaussian packet and tabulate ⟨x⟩, ⟨v⟩, θ₁, θ₂ and the norm.

    Example:
        damped-kernel evolve --v0 5 --T 0:3:61 --oracle
    """
    execute('evolve', config, {
        'kappa': kappa, 'hbar': hbar, 'format': fmt, 'gnuplot': gnuplot, 'out': out,
        'workers': workers, 'v0': v0, 'theta0': theta0, 'T': T_grid, 'oracle': oracle,
        'oracle_panels': oracle_panels,
    })


@click.command()
@physics_options
@packet_options
@time_option
@click.option('--method', type=str,
              help='Comma list of LG, KOCHAN, CK, DGST or "all" [default all]')
def compare(config, kappa, hbar, fmt, gnuplot, out, workers, v0, theta0, T_grid, method):
    """
    Tabulate ⟨x⟩ and ⟨v⟩ for the competing quantizations.

    Example:
        damped-kernel compare --method LG,KOCHAN --T 0:40:801 --gnuplot
    """
    execute('compare', config, {
        'kappa': kappa, 'hbar': hbar, 'format': fmt, 'gnuplot': gnuplot, 'out': out,
        'workers': workers, 'v0': v0, 'theta0': theta0, 'T': T_grid, 'method': method,
    })


@click.command()
@click.option('--config', type=click.Path(exists=True, dir_okay=False), help='Config file path')
@click.option('--format', 'fmt', type=click.Choice(['csv', 'json']), help='Output format')
@click.option('--out', type=str, help="Output path; '-' writes to stdout")
@click.option('--inject-fault', type=str,
              help='Force the named invariant (or "all") to fail; for testing the exit path')
def check(config, fmt, out, inject_fault):
    """
    Run every invariant of the model and fail with exit status 2 on any violation.

    Example:
        damped-kernel check --out -
    """
    execute('check', config, {'format': fmt, 'out': out, 'inject_fault': inject_fault})
