"""
Command orchestration.

Each cmd_* function loads a measure config, runs one computation and
writes its artifact (CSV or JSON) to `out` when given. The rendered text
is returned either way, so identical settings give identical bytes.
"""

from __future__ import annotations

import warnings
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .classify import classify, slice_singularity_gate
from .config import load_measure, parse_f_spec, parse_grid
from .errors import PrecisionWarning, ValidationError
from .expansion import analyze, reconstruction_error
from .export import (
    encode,
    grid_csv,
    matrix_csv,
    moments_csv,
    sweep_csv,
    tensor_csv,
    to_json,
    write_text,
)
from .kaczmarz import aux_matrix
from .measures import DigitIFS, moment_table, moments
from .quadrature import DEFAULT_ORDER, QuadratureSpec
from .transforms import inner_function, nct_d, polydisk_grid
from .verify import run_suite

Progress = Callable[[int, int, str], None] | None


def _reporter(progress_callback: Progress) -> Callable[[int, int, str], None]:
    def report_progress(current: int, total: int, message: str) -> None:
        if progress_callback:
            progress_callback(current, total, message)

    return report_progress


def _orders(orders: tuple[int, ...] | None, dim: int) -> tuple[int, ...]:
    if orders is None:
        return (DEFAULT_ORDER,) * dim
    if len(orders) == 1:
        return orders * dim
    if len(orders) != dim:
        raise ValidationError(f"expected {dim} orders, got {len(orders)}")
    return tuple(orders)


def cmd_moments(
    config: Path,
    nmax: int = 16,
    out: Path | None = None,
    progress_callback: Progress = None,
) -> str:
    """CSV of μ̂(n) for n = -nmax..nmax (along the first axis for d > 1)."""
    report = _reporter(progress_callback)
    report(1, 2, f"Loading {Path(config).name}")
    m = load_measure(config)
    n = np.arange(-nmax, nmax + 1)
    xi = np.zeros((len(n), m.dim))
    xi[:, 0] = n
    report(2, 2, f"Computing {len(n)} moments")
    values, errors = moments(m, xi)
    return write_text(moments_csv(n, values, errors), out)


def cmd_aux(
    config: Path,
    n: int = 16,
    out: Path | None = None,
    progress_callback: Progress = None,
) -> tuple[str, float]:
    """AuxMatrix CSV of a 1-dim measure (JSON with the inner function for a .json output)."""
    report = _reporter(progress_callback)
    report(1, 2, f"Loading {Path(config).name}")
    m = load_measure(config)
    if m.dim != 1:
        raise ValidationError(f"aux needs a one-dimensional measure, got dim {m.dim}")
    report(2, 2, f"Running the recursion to order {n}")
    aux = aux_matrix(moment_table(m, nmax=n), n)
    residual = aux.consistency_residual()
    if out is not None and Path(out).suffix == ".json":
        data = aux.to_dict()
        data["inner_function"] = inner_function(m, n).to_dict()
        return write_text(to_json(data), out), residual
    return write_text(matrix_csv(aux.matrix), out), residual


def cmd_classify(
    config: Path,
    out: Path | None = None,
    progress_callback: Progress = None,
) -> tuple[str, str]:
    """ClassificationReport JSON and its terminal table."""
    report = _reporter(progress_callback)
    report(1, 2, f"Loading {Path(config).name}")
    m = load_measure(config)
    report(2, 2, "Classifying coordinates")
    if isinstance(m, DigitIFS):
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", PrecisionWarning)
            result = classify(m)
        data = result.to_dict()
        data["warnings"] = [str(w.message) for w in caught]
        table = result.to_table()
    else:
        gate = slice_singularity_gate(m)
        data = {"name": getattr(m, "name", None), "kind": m.kind, "overall": gate}
        table = f"slice singular in any variable order: {gate}"
    return write_text(to_json(data), out), table


def cmd_expand(
    config: Path,
    f_spec: str | None = None,
    orders: tuple[int, ...] | None = None,
    quadrature: QuadratureSpec | None = None,
    out: Path | None = None,
    workers: int = 1,
    progress_callback: Progress = None,
) -> str:
    """CoeffTensor JSON with its Bessel defect (flat CSV for a .csv output)."""
    report = _reporter(progress_callback)
    report(1, 3, f"Loading {Path(config).name}")
    m = load_measure(config)
    f = parse_f_spec(f_spec, m.dim)
    orders = _orders(orders, m.dim)
    report(2, 3, f"Computing coefficients to orders {orders}")
    c = analyze(m, f, orders, quadrature, workers=workers)
    report(3, 3, "Writing tensor")
    if out is not None and Path(out).suffix == ".csv":
        return write_text(tensor_csv(c.values), out)
    data = c.to_dict()
    data["values"] = c.values
    return write_text(to_json(data), out)


def cmd_reconstruct(
    config: Path,
    f_spec: str | None = None,
    orders: tuple[int, ...] | None = None,
    quadrature: QuadratureSpec | None = None,
    out: Path | None = None,
    workers: int = 1,
    progress_callback: Progress = None,
) -> tuple[str, float]:
    """Sweep CSV of reconstruction errors, and the final error."""
    report = _reporter(progress_callback)
    report(1, 2, f"Loading {Path(config).name}")
    m = load_measure(config)
    f = parse_f_spec(f_spec, m.dim)
    orders = _orders(orders, m.dim)
    report(2, 2, f"Sweeping partial sums up to {orders}")
    result = reconstruction_error(m, f, orders, quadrature, workers=workers)
    return write_text(sweep_csv(result.rows, m.dim), out), result.error


def cmd_nct(
    config: Path,
    f_spec: str | None = None,
    orders: tuple[int, ...] | None = None,
    grid: str = "0.9,16",
    quadrature: QuadratureSpec | None = None,
    out: Path | None = None,
    workers: int = 1,
    progress_callback: Progress = None,
) -> str:
    """Polydisk grid CSV of V_μ(f)."""
    report = _reporter(progress_callback)
    report(1, 3, f"Loading {Path(config).name}")
    m = load_measure(config)
    f = parse_f_spec(f_spec, m.dim)
    orders = _orders(orders, m.dim)
    radius, counts = parse_grid(grid, m.dim)
    report(2, 3, f"Computing the transform to orders {orders}")
    series = nct_d(m, f, orders, quadrature, workers=workers)
    report(3, 3, f"Evaluating on {int(np.prod(counts))} grid points")
    points = polydisk_grid(radius, counts)
    return write_text(grid_csv(points, series.evaluate(points)), out)


def cmd_verify(
    config: Path,
    suite: str = "all",
    quadrature: QuadratureSpec | None = None,
    seed: int = 0,
    out: Path | None = None,
    progress_callback: Progress = None,
    workers: int = 1,
) -> tuple[str, bool]:
    """Pass/fail JSON over the invariant suites; identical bytes for any worker count."""
    m = load_measure(config)
    results = run_suite(m, suite, quadrature, seed, progress_callback, workers)
    data: dict[str, Any] = {
        "config": Path(config).name,
        "seed": seed,
        "passed": all(r.passed for r in results),
        "suites": [r.to_dict() for r in results],
    }
    return write_text(to_json(encode(data)), out), data["passed"]


__all__ = [
    "cmd_aux",
    "cmd_classify",
    "cmd_expand",
    "cmd_moments",
    "cmd_nct",
    "cmd_reconstruct",
    "cmd_verify",
]
