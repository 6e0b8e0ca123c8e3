"""
Measure configs, f-specs and run settings.

Measure configs are JSON documents read with the YAML loader, so YAML
spellings of the same mapping work too. Numbers may be written as
fraction strings such as "1/3".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .errors import ConfigError, UnsupportedMeasureError, ValidationError
from .measures import AtomicMeasure, DigitIFS, Measure, ProductMeasure
from .quadrature import QuadratureSpec
from .trigpoly import TrigPoly

MEASURE_KINDS = ("digit_ifs", "atomic", "product")


def _number(value: Any) -> float:
    if isinstance(value, bool):
        raise ConfigError(f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError):
            pass
    raise ConfigError(f"expected a number or fraction string, got {value!r}")


def _numbers(values: Any, what: str) -> list[float]:
    if not isinstance(values, list) or not values:
        raise ConfigError(f"{what} must be a non-empty list")
    return [_number(v) for v in values]


def _require(data: dict[str, Any], key: str, kind: str) -> Any:
    if key not in data:
        raise ConfigError(f"{kind} config is missing {key!r}")
    return data[key]


def measure_from_dict(data: dict[str, Any]) -> Measure:
    """
    Build a measure from a parsed config mapping.

    Raises:
        ConfigError: malformed or unknown config.
        UnsupportedMeasureError: a recognized kind with no expansion support.
    """
    if not isinstance(data, dict):
        raise ConfigError("a measure config must be a mapping")
    kind = data.get("kind")
    name = data.get("name")

    if kind == "density":
        raise UnsupportedMeasureError(
            "density-weighted measures are not supported; give a digit_ifs, atomic or product config"
        )
    if kind not in MEASURE_KINDS:
        raise ConfigError(f"unknown measure kind {kind!r}; expected one of {', '.join(MEASURE_KINDS)}")

    try:
        if kind == "digit_ifs":
            digits = _require(data, "digits", kind)
            if not isinstance(digits, list) or not digits:
                raise ConfigError("digits must be a non-empty list")
            rows = [[d] if not isinstance(d, list) else d for d in digits]
            dim = int(data.get("dim", len(rows[0])))
            if any(len(row) != dim for row in rows):
                raise ConfigError(f"dim {dim} does not match every digit row")
            weights = _numbers(_require(data, "weights", kind), "weights")
            return DigitIFS(int(_require(data, "base", kind)), dim, np.array(rows), weights, name=name)

        if kind == "atomic":
            points = _require(data, "points", kind)
            if not isinstance(points, list) or not points:
                raise ConfigError("points must be a non-empty list")
            rows = [[_number(p)] if not isinstance(p, list) else [_number(v) for v in p] for p in points]
            if "dim" in data and int(data["dim"]) != len(rows[0]):
                raise ConfigError(f"dim {data['dim']} does not match points of length {len(rows[0])}")
            weights = _numbers(_require(data, "weights", kind), "weights")
            return AtomicMeasure(np.array(rows), weights, name=name)

        factors = _require(data, "factors", kind)
        if not isinstance(factors, list) or not factors:
            raise ConfigError("factors must be a non-empty list")
        return ProductMeasure(tuple(measure_from_dict(f) for f in factors), name=name)
    except ValidationError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigError(f"bad {kind} config: {e}") from e


def load_measure(path: Path) -> Measure:
    """Read a measure config file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}") from e
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError(f"{path} is not valid JSON/YAML: {e}") from e
    return measure_from_dict(data)


def _coefficient(value: Any) -> complex:
    if isinstance(value, list):
        if len(value) != 2:
            raise ConfigError(f"complex coefficients are [re, im] pairs, got {value!r}")
        return complex(_number(value[0]), _number(value[1]))
    return complex(_number(value))


def trigpoly_from_dict(data: dict[str, Any], dim: int) -> TrigPoly:
    """Build f from {"frequencies": [[ν...]], "coefficients": [[re, im]]}."""
    if not isinstance(data, dict):
        raise ConfigError("an f-spec must be a mapping")
    freqs = data.get("frequencies", [])
    coeffs = data.get("coefficients", [])
    if not isinstance(freqs, list) or not isinstance(coeffs, list) or len(freqs) != len(coeffs):
        raise ConfigError("f-spec needs equally long frequencies and coefficients lists")
    rows = [[f] if not isinstance(f, list) else f for f in freqs]
    if any(len(r) != dim for r in rows):
        raise ConfigError(f"f-spec frequencies must have {dim} entries")
    if any(not float(v).is_integer() for r in rows for v in r):
        raise ConfigError("f-spec frequencies must be integers")
    values = np.array([_coefficient(c) for c in coeffs], dtype=np.complex128)
    return TrigPoly(dim, np.array(rows, dtype=np.int64).reshape(-1, dim), values)


def parse_f_spec(spec: str | None, dim: int) -> TrigPoly:
    """
    Parse an f-spec given inline as a JSON object or as a path to a
    JSON/YAML file.
    No spec means the constant function 1.
    """
    if spec is None:
        return TrigPoly.constant(dim)
    text = spec
    if not spec.lstrip().startswith("{"):
        path = Path(spec)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"cannot read {path}: {e}") from e
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError(f"f-spec is not valid JSON/YAML: {e}") from e
    return trigpoly_from_dict(data, dim)


def _integers(text: str, what: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"{what} must be comma-separated integers, got {text!r}") from None


def parse_orders(text: str | None, dim: int, default: int = 16) -> tuple[int, ...]:
    """'8,8' -> (8, 8); a single value is used for every coordinate."""
    if text is None:
        return (default,) * dim
    orders = _integers(text, "orders")
    if len(orders) == 1:
        orders = orders * dim
    if len(orders) != dim:
        raise ConfigError(f"expected {dim} orders, got {len(orders)}")
    if any(n < 0 for n in orders):
        raise ConfigError("orders must be non-negative")
    return tuple(orders)


def parse_grid(text: str, dim: int) -> tuple[float, tuple[int, ...]]:
    """'R,COUNT[,COUNT...]' -> (radius, angle counts per coordinate)."""
    head, _, rest = text.partition(",")
    radius = _number(head)
    if not 0 <= radius < 1:
        raise ConfigError(f"grid radius must lie in [0, 1), got {radius}")
    counts = _integers(rest, "grid counts") if rest else [16]
    if len(counts) == 1:
        counts = counts * dim
    if len(counts) != dim or any(n < 1 for n in counts):
        raise ConfigError(f"grid needs {dim} positive angle counts")
    return radius, tuple(counts)


@dataclass
class RunConfig:
    """Settings of one CLI run."""

    # Inputs
    config: Path
    command: str
    f_spec: str | None = None

    # Truncation and quadrature
    orders: tuple[int, ...] | None = None
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    nmax: int = 16
    grid: str = "0.9,16"

    # Verification
    suite: str = "all"

    # Output
    out: Path | None = None
    seed: int = 0
    workers: int = 1

    def __post_init__(self) -> None:
        if self.nmax < 0:
            raise ConfigError(f"nmax must be non-negative, got {self.nmax}")
        if self.workers < 1:
            raise ConfigError(f"workers must be positive, got {self.workers}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if self.orders is not None and any(n < 0 for n in self.orders):
            raise ConfigError(f"orders must be non-negative, got {self.orders}")
