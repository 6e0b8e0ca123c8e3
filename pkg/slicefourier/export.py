"""
CSV and JSON writers.

Complex numbers are written as [re, im] pairs in JSON and as separate
re/im columns in CSV. Floats use repr, so identical inputs give identical
bytes.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np


def encode(value: Any) -> Any:
    """Convert numpy arrays, complex numbers and tuples to JSON-ready values."""
    if isinstance(value, dict):
        return {str(k): encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [encode(v) for v in value]
    if isinstance(value, np.ndarray):
        return encode(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, Path):
        return str(value)
    return value


def to_json(data: Any) -> str:
    return json.dumps(encode(data), indent=2, sort_keys=True) + "\n"


def to_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buffer.getvalue()


def write_text(text: str, out: Path | None) -> str:
    """Write to out when given; return the text either way."""
    if out is not None:
        out = Path(out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")
    return text


def moments_csv(n: np.ndarray, values: np.ndarray, errors: np.ndarray) -> str:
    rows = ((int(k), v.real, v.imag, e) for k, v, e in zip(n, values, errors))
    return to_csv(["n", "re", "im", "error"], rows)


def matrix_csv(matrix: np.ndarray) -> str:
    """Entries of a lower-triangular matrix as (row, col, re, im)."""
    rows = (
        (i, j, matrix[i, j].real, matrix[i, j].imag)
        for i in range(matrix.shape[0])
        for j in range(i + 1)
    )
    return to_csv(["row", "col", "re", "im"], rows)


def tensor_csv(values: np.ndarray) -> str:
    """Flat coefficient tensor with one index column per coordinate."""
    header = [f"n{j + 1}" for j in range(values.ndim)] + ["re", "im"]
    rows = (tuple(int(i) for i in index) + (v.real, v.imag) for index, v in np.ndenumerate(values))
    return to_csv(header, rows)


def sweep_csv(rows: Iterable[tuple[tuple[int, ...], float]], dim: int) -> str:
    header = [f"N{j + 1}" for j in range(dim)] + ["error"]
    return to_csv(header, (tuple(orders) + (error,) for orders, error in rows))


def grid_csv(points: np.ndarray, values: np.ndarray) -> str:
    """Polydisk samples: re/im of each coordinate, then re/im of the value."""
    dim = points.shape[1]
    header = [f"{part}_z{j + 1}" for j in range(dim) for part in ("re", "im")] + ["re", "im"]
    rows = (
        tuple(x for z in point for x in (z.real, z.imag)) + (v.real, v.imag)
        for point, v in zip(points, values)
    )
    return to_csv(header, rows)
