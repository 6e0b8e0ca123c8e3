"""
Measure types.

Three kinds of probability measure on [0,1)^d are supported:

- DigitIFS: the invariant measure of a Cartesian base-b digit system
  x ↦ (x+δ)/b with probability weights, i.e. the law of Σ δ_k b^{-k}
  with i.i.d. digit vectors δ_k.
- AtomicMeasure: finitely many weighted points.
- ProductMeasure: a product of one-dimensional DigitIFS/atomic factors.

All are immutable after construction. Repeated digit vectors (or atoms)
are merged by summing their weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from ..errors import ValidationError

# Weights must sum to one within this tolerance
WEIGHT_SUM_TOL = 1e-12


def _check_weights(weights: np.ndarray) -> None:
    if weights.ndim != 1 or len(weights) == 0:
        raise ValidationError("weights must be a non-empty list")
    if np.any(weights <= 0):
        raise ValidationError("weights must be strictly positive")
    total = float(weights.sum())
    if abs(total - 1.0) > WEIGHT_SUM_TOL:
        raise ValidationError(f"weights sum to {total!r}, expected 1")


def _merge_rows(rows: np.ndarray, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Merge identical rows, summing weights; rows come back sorted."""
    unique, inverse = np.unique(rows, axis=0, return_inverse=True)
    merged = np.zeros(len(unique))
    np.add.at(merged, inverse.reshape(-1), weights)
    return unique, merged


@dataclass(frozen=True, eq=False)
class DigitIFS:
    """Invariant measure of the digit system x ↦ (x+δ)/base on [0,1)^dim."""

    base: int
    dim: int
    digits: np.ndarray  # (D, dim) int64, sorted, distinct
    weights: np.ndarray  # (D,) float64
    name: str | None = None

    def __post_init__(self) -> None:
        if int(self.base) < 2:
            raise ValidationError(f"base must be at least 2, got {self.base}")
        if int(self.dim) < 1:
            raise ValidationError(f"dim must be at least 1, got {self.dim}")
        digits = np.asarray(self.digits, dtype=np.int64)
        if digits.ndim == 2 and digits.shape[1] != int(self.dim):
            raise ValidationError(f"digit rows have length {digits.shape[1]}, expected {self.dim}")
        digits = digits.reshape(-1, int(self.dim))
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if len(digits) != len(weights):
            raise ValidationError("digits and weights differ in length")
        _check_weights(weights)
        if np.any(digits < 0) or np.any(digits >= self.base):
            raise ValidationError(f"digits must lie in 0..{self.base - 1}")

        digits, weights = _merge_rows(digits, weights)

        object.__setattr__(self, "base", int(self.base))
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "digits", digits)
        object.__setattr__(self, "weights", weights)

    @property
    def kind(self) -> str:
        return "digit_ifs"

    def digit_polynomial(self, eta: np.ndarray) -> np.ndarray:
        """m(η) = Σ_δ w_δ e^{-2πi δ·η} for an (..., dim) array of η."""
        eta = np.asarray(eta, dtype=float)
        phase = np.tensordot(eta, self.digits.T.astype(float), axes=([-1], [0]))
        return np.exp(-2j * np.pi * phase) @ self.weights

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"DigitIFS{label}(base={self.base}, dim={self.dim}, digits={len(self.digits)})"


@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    """A finite weighted sum of point masses in [0,1)^dim."""

    points: np.ndarray  # (n, dim) float64, sorted, distinct
    weights: np.ndarray  # (n,) float64
    name: str | None = None

    def __post_init__(self) -> None:
        points = np.asarray(self.points, dtype=float)
        if points.ndim == 1:
            points = points.reshape(-1, 1)
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if len(points) != len(weights):
            raise ValidationError("points and weights differ in length")
        _check_weights(weights)
        if np.any(points < 0) or np.any(points >= 1):
            raise ValidationError("atoms must lie in [0,1)^dim")

        points, weights = _merge_rows(points, weights)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def kind(self) -> str:
        return "atomic"

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"AtomicMeasure{label}(dim={self.dim}, atoms={len(self.points)})"


@dataclass(frozen=True, eq=False)
class ProductMeasure:
    """Product of one-dimensional factors, one per coordinate."""

    factors: tuple[DigitIFS | AtomicMeasure, ...]
    name: str | None = None

    def __post_init__(self) -> None:
        factors = tuple(self.factors)
        if not factors:
            raise ValidationError("a product needs at least one factor")
        for factor in factors:
            if not isinstance(factor, (DigitIFS, AtomicMeasure)) or factor.dim != 1:
                raise ValidationError("product factors must be 1-dim DigitIFS or atomic measures")
        object.__setattr__(self, "factors", factors)

    @property
    def dim(self) -> int:
        return len(self.factors)

    @property
    def kind(self) -> str:
        return "product"

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"ProductMeasure{label}({', '.join(map(repr, self.factors))})"


Measure = Union[DigitIFS, AtomicMeasure, ProductMeasure]


# Canonical measures used throughout the tests and configs

def cantor() -> DigitIFS:
    """Middle-thirds Cantor measure."""
    return DigitIFS(3, 1, [[0], [2]], [0.5, 0.5], name="cantor")


def lebesgue(dim: int = 1, base: int = 2) -> DigitIFS:
    """Lebesgue measure on [0,1)^dim as a full uniform digit system."""
    grid = np.stack(np.meshgrid(*[np.arange(base)] * dim, indexing="ij"), axis=-1)
    digits = grid.reshape(-1, dim)
    return DigitIFS(base, dim, digits, np.full(len(digits), 1.0 / len(digits)), name="lebesgue")


def menger() -> DigitIFS:
    """Menger sponge: base-3 triples with at most one coordinate equal to 1."""
    grid = np.stack(np.meshgrid(*[np.arange(3)] * 3, indexing="ij"), axis=-1).reshape(-1, 3)
    digits = grid[(grid == 1).sum(axis=1) <= 1]
    return DigitIFS(3, 3, digits, np.full(len(digits), 1.0 / len(digits)), name="menger")


def dirac(point: float = 0.0) -> AtomicMeasure:
    return AtomicMeasure([[point]], [1.0], name="dirac")


def half_atomic() -> AtomicMeasure:
    """(δ_0 + δ_{1/2})/2, whose moments are (1 + (-1)^n)/2."""
    return AtomicMeasure([[0.0], [0.5]], [0.5, 0.5], name="half_atomic")
