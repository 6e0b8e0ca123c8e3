"""
Slice-singularity classification for digit IFS configurations.

Each coordinate of a DigitIFS projects to a one-dimensional digit system
(its reduced row: merged digits and weights). Its invariant measure is
Lebesgue exactly when the reduced digits fill 0..b-1 with weight 1/b each;
otherwise the images either fail to cover [0,1) (the attractor is null) or
Kakutani's dichotomy makes the measure singular. A DigitIFS is slice
singular in any variable order when every coordinate is singular.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import PrecisionWarning, UnsupportedMeasureError
from .measures import AtomicMeasure, DigitIFS, ProductMeasure, marginal

SINGULAR = "singular"
LEBESGUE = "lebesgue"

# Weights within this distance of 1/b count as uniform
UNIFORM_TOL = 1e-12

# Weights within this distance but outside UNIFORM_TOL raise a warning
NEAR_MISS_TOL = 1e-9


@dataclass(frozen=True)
class CoordinateRecord:
    """Reduced one-dimensional digit system of a single coordinate."""

    coordinate: int
    digits: tuple[int, ...]
    weights: tuple[float, ...]
    full: bool  # reduced digits are exactly 0..b-1
    verdict: str
    near_miss: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "coordinate": self.coordinate,
            "digits": list(self.digits),
            "weights": list(self.weights),
            "full": self.full,
            "verdict": self.verdict,
            "near_miss": self.near_miss,
        }


@dataclass(frozen=True)
class ClassificationReport:
    base: int
    coordinates: list[CoordinateRecord] = field(default_factory=list)
    name: str | None = None

    @property
    def overall(self) -> bool:
        """True iff every coordinate is singular."""
        return all(r.verdict == SINGULAR for r in self.coordinates)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "base": self.base,
            "overall": self.overall,
            "coordinates": [r.to_dict() for r in self.coordinates],
        }

    def to_table(self) -> str:
        """Plain-text table for the terminal."""
        lines = [f"{'coord':>5}  {'verdict':<9}  {'full':<5}  digits: weights"]
        for r in self.coordinates:
            row = ", ".join(f"{d}:{w:.6g}" for d, w in zip(r.digits, r.weights))
            flag = " (near miss)" if r.near_miss else ""
            lines.append(f"{r.coordinate:>5}  {r.verdict:<9}  {str(r.full):<5}  {row}{flag}")
        lines.append(f"slice singular in any variable order: {self.overall}")
        return "\n".join(lines)


def _coordinate_record(m: DigitIFS, coordinate: int) -> CoordinateRecord:
    row = m if m.dim == 1 else marginal(m, [coordinate])
    digits = tuple(int(d) for d in row.digits[:, 0])
    weights = tuple(float(w) for w in row.weights)
    full = digits == tuple(range(m.base))
    if not full:
        return CoordinateRecord(coordinate, digits, weights, False, SINGULAR)

    deviation = float(np.abs(np.asarray(weights) - 1.0 / m.base).max())
    if deviation <= UNIFORM_TOL:
        return CoordinateRecord(coordinate, digits, weights, True, LEBESGUE)
    near_miss = deviation <= NEAR_MISS_TOL
    if near_miss:
        warnings.warn(
            f"coordinate {coordinate} weights are within {deviation:.2e} of uniform; "
            "classified singular",
            PrecisionWarning,
            stacklevel=3,
        )
    return CoordinateRecord(coordinate, digits, weights, True, SINGULAR, near_miss)


def classify(m: DigitIFS) -> ClassificationReport:
    """Per-coordinate Lebesgue/singular verdicts for a DigitIFS."""
    if not isinstance(m, DigitIFS):
        raise UnsupportedMeasureError(f"classify takes a DigitIFS, got {type(m).__name__}")
    records = [_coordinate_record(m, j) for j in range(m.dim)]
    return ClassificationReport(m.base, records, m.name)


def slice_singularity_gate(m: Any) -> bool:
    """
    Whether expansions may be computed for m.

    Atomic measures always pass; a DigitIFS passes when classify says so;
    a product passes when every factor does.
    """
    if isinstance(m, AtomicMeasure):
        return True
    if isinstance(m, DigitIFS):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", PrecisionWarning)
            return classify(m).overall
    if isinstance(m, ProductMeasure):
        return all(slice_singularity_gate(factor) for factor in m.factors)
    raise UnsupportedMeasureError(f"no slice-singularity test for {type(m).__name__}")
