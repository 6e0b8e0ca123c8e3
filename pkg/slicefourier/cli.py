"""
Command-line interface for slice-fourier.

Usage:
    slicefourier classify --config configs/menger.json
    slicefourier expand --config configs/cantor2.json --orders 8,8 --quad prefix:12
    slicefourier verify --config configs/cantor.json --suite all --out report.json

Exit codes: 0 on success, 2 on validation errors, 3 when a numeric budget
(truncation depth, quadrature size, radius) is exhausted. Errors are
written to stderr as JSON.
"""

from __future__ import annotations

import json
import sys
from functools import wraps
from pathlib import Path
from typing import Any, Callable

import click

from . import __version__
from .config import RunConfig, parse_orders
from .errors import NumericBudgetError, SliceFourierError, ValidationError
from .quadrature import QuadratureSpec
from .runner import (
    cmd_aux,
    cmd_classify,
    cmd_expand,
    cmd_moments,
    cmd_nct,
    cmd_reconstruct,
    cmd_verify,
)

EXIT_VALIDATION = 2
EXIT_BUDGET = 3


def _fail(error: SliceFourierError) -> None:
    click.echo(json.dumps(error.to_dict(), sort_keys=True), err=True)
    raise SystemExit(EXIT_BUDGET if isinstance(error, NumericBudgetError) else EXIT_VALIDATION)


def handle_errors(command: Callable[..., Any]) -> Callable[..., Any]:
    """Map package errors to exit codes with a JSON message on stderr."""

    @wraps(command)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return command(*args, **kwargs)
        except (ValidationError, NumericBudgetError) as e:
            _fail(e)

    return wrapper


def _progress(quiet: bool) -> Callable[[int, int, str], None] | None:
    if quiet:
        return None

    def show_progress(current: int, total: int, message: str) -> None:
        click.echo(f"[{current}/{total}] {message}", err=True)

    return show_progress


def _emit(text: str, out: Path | None, quiet: bool) -> None:
    if out is None:
        click.echo(text, nl=False)
    elif not quiet:
        click.secho(f"Wrote {out}", fg="green", err=True)


config_option = click.option(
    "--config", "config_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Measure config (JSON or YAML).",
)
out_option = click.option(
    "--out",
    type=click.Path(dir_okay=False, path_type=Path),
    help="Output file. Defaults to stdout.",
)
quiet_option = click.option("-q", "--quiet", is_flag=True, help="Suppress progress output.")
f_option = click.option(
    "--f", "f_spec",
    help='Trig polynomial as JSON or a file path: {"frequencies": [[...]], "coefficients": [[re, im]]}. Defaults to 1.',
)
orders_option = click.option("--orders", help="Truncation orders N1,N2,... (one value applies to all).")
quad_option = click.option(
    "--quad", default="prefix:12", show_default=True, help="Quadrature: prefix:K or mc:COUNT."
)
seed_option = click.option("--seed", default=0, show_default=True, type=click.IntRange(min=0))
workers_option = click.option(
    "--workers", default=1, show_default=True, type=click.IntRange(min=1), help="Worker threads."
)


def _run_config(command: str, config_path: Path, **kwargs: Any) -> RunConfig:
    quad = kwargs.pop("quad", None)
    seed = kwargs.get("seed", 0)
    quadrature = QuadratureSpec.parse(quad, seed=seed) if quad else QuadratureSpec(seed=seed)
    return RunConfig(config=config_path, command=command, quadrature=quadrature, **kwargs)


def _dimension(config_path: Path) -> int:
    from .config import load_measure

    return load_measure(config_path).dim


@click.group()
@click.version_option(version=__version__)
def main() -> None:
    """
    Fourier expansions for singular and slice-singular measures.

    Measures are given as digit IFS, atomic or product configs; see
    configs/ for examples.
    """


@main.command()
@config_option
@click.option("--nmax", default=16, show_default=True, type=click.IntRange(min=0))
@out_option
@quiet_option
@handle_errors
def moments(config_path: Path, nmax: int, out: Path | None, quiet: bool) -> None:
    """Fourier moments μ̂(n), n = -nmax..nmax, as CSV."""
    run = _run_config("moments", config_path, nmax=nmax, out=out)
    text = cmd_moments(run.config, run.nmax, run.out, _progress(quiet))
    _emit(text, out, quiet)


@main.command()
@config_option
@click.option("--nmax", default=16, show_default=True, type=click.IntRange(min=0), help="Order N.")
@out_option
@quiet_option
@handle_errors
def aux(config_path: Path, nmax: int, out: Path | None, quiet: bool) -> None:
    """Auxiliary matrix of a 1-dim measure as CSV (JSON for a .json --out)."""
    run = _run_config("aux", config_path, nmax=nmax, out=out)
    text, residual = cmd_aux(run.config, run.nmax, run.out, _progress(quiet))
    _emit(text, out, quiet)
    if not quiet:
        click.echo(f"consistency residual: {residual:.3e}", err=True)


@main.command(name="classify")
@config_option
@out_option
@quiet_option
@handle_errors
def classify_command(config_path: Path, out: Path | None, quiet: bool) -> None:
    """Slice-singularity report as JSON."""
    text, table = cmd_classify(config_path, out, _progress(quiet))
    _emit(text, out, quiet)
    if not quiet:
        click.echo(table, err=True)


@main.command()
@config_option
@f_option
@orders_option
@quad_option
@seed_option
@workers_option
@out_option
@quiet_option
@handle_errors
def expand(config_path, f_spec, orders, quad, seed, workers, out, quiet) -> None:
    """Expansion coefficients as JSON (or flat CSV for a .csv --out)."""
    run = _run_config(
        "expand", config_path, f_spec=f_spec, quad=quad, seed=seed, workers=workers, out=out,
        orders=parse_orders(orders, _dimension(config_path)) if orders else None,
    )
    text = cmd_expand(run.config, run.f_spec, run.orders, run.quadrature, run.out, run.workers, _progress(quiet))
    _emit(text, out, quiet)


@main.command()
@config_option
@f_option
@orders_option
@quad_option
@seed_option
@workers_option
@out_option
@quiet_option
@handle_errors
def reconstruct(config_path, f_spec, orders, quad, seed, workers, out, quiet) -> None:
    """Reconstruction-error sweep as CSV."""
    run = _run_config(
        "reconstruct", config_path, f_spec=f_spec, quad=quad, seed=seed, workers=workers, out=out,
        orders=parse_orders(orders, _dimension(config_path)) if orders else None,
    )
    text, error = cmd_reconstruct(
        run.config, run.f_spec, run.orders, run.quadrature, run.out, run.workers, _progress(quiet)
    )
    _emit(text, out, quiet)
    if not quiet:
        click.echo(f"final error: {error:.6e}", err=True)


@main.command()
@config_option
@f_option
@orders_option
@click.option("--grid", default="0.9,16", show_default=True, help="R,THETA-COUNTS for the polydisk grid.")
@quad_option
@seed_option
@workers_option
@out_option
@quiet_option
@handle_errors
def nct(config_path, f_spec, orders, grid, quad, seed, workers, out, quiet) -> None:
    """Normalized Cauchy Transform on a polydisk grid as CSV."""
    run = _run_config(
        "nct", config_path, f_spec=f_spec, quad=quad, seed=seed, workers=workers, out=out, grid=grid,
        orders=parse_orders(orders, _dimension(config_path)) if orders else None,
    )
    text = cmd_nct(
        run.config, run.f_spec, run.orders, run.grid, run.quadrature, run.out, run.workers, _progress(quiet)
    )
    _emit(text, out, quiet)


@main.command()
@config_option
@click.option(
    "--suite",
    default="all",
    show_default=True,
    type=click.Choice(["measure", "kaczmarz", "expansion", "transforms", "classify", "all"]),
)
@click.option("--quad", default=None, help="Quadrature: prefix:K or mc:COUNT (suite default if omitted).")
@seed_option
@workers_option
@out_option
@quiet_option
@handle_errors
def verify(config_path, suite, quad, seed, workers, out, quiet) -> None:
    """Run invariant suites; pass/fail JSON."""
    quadrature = QuadratureSpec.parse(quad, seed=seed) if quad else None
    text, passed = cmd_verify(config_path, suite, quadrature, seed, out, _progress(quiet), workers)
    _emit(text, out, quiet)
    if not quiet:
        if passed:
            click.secho("All checks passed", fg="green", err=True)
        else:
            click.secho("Some checks failed", fg="red", err=True)


if __name__ == "__main__":
    sys.exit(main())
