"""
Trigonometric polynomials on [0,1)^d.

A TrigPoly is a finite map from integer frequency vectors to complex
coefficients, evaluated as Σ c_ν e^{2πi ν·x}. It is the function type
every module analyzes, transforms and reconstructs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np


@dataclass(frozen=True, eq=False)
class TrigPoly:
    """A finitely supported trigonometric polynomial."""

    dim: int
    frequencies: np.ndarray  # (M, dim) int64, rows distinct
    coefficients: np.ndarray  # (M,) complex128

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError("TrigPoly dimension must be at least 1")
        freqs = np.asarray(self.frequencies, dtype=np.int64).reshape(-1, self.dim)
        coeffs = np.asarray(self.coefficients, dtype=np.complex128).reshape(-1)
        if len(freqs) != len(coeffs):
            raise ValueError("frequencies and coefficients differ in length")

        # Merge repeated frequencies; drop exact zeros
        if len(freqs):
            unique, inverse = np.unique(freqs, axis=0, return_inverse=True)
            merged = np.zeros(len(unique), dtype=np.complex128)
            np.add.at(merged, inverse.reshape(-1), coeffs)
            keep = merged != 0
            freqs, coeffs = unique[keep], merged[keep]

        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def zero(cls, dim: int) -> TrigPoly:
        return cls(dim, np.zeros((0, dim), dtype=np.int64), np.zeros(0))

    @classmethod
    def constant(cls, dim: int, value: complex = 1.0) -> TrigPoly:
        return cls(dim, np.zeros((1, dim), dtype=np.int64), [value])

    @classmethod
    def exponential(cls, frequency: Iterable[int] | int, coefficient: complex = 1.0) -> TrigPoly:
        """The exponential coefficient·e^{2πi ν·x}."""
        nu = np.atleast_1d(np.asarray(frequency, dtype=np.int64))
        return cls(len(nu), nu.reshape(1, -1), [coefficient])

    @classmethod
    def from_mapping(cls, dim: int, terms: Mapping[tuple[int, ...] | int, complex]) -> TrigPoly:
        freqs = [np.atleast_1d(k) for k in terms]
        return cls(dim, np.array(freqs, dtype=np.int64).reshape(-1, dim), list(terms.values()))

    def __len__(self) -> int:
        return len(self.coefficients)

    def is_zero(self) -> bool:
        return len(self.coefficients) == 0

    def __add__(self, other: TrigPoly) -> TrigPoly:
        self._check_dim(other)
        return TrigPoly(
            self.dim,
            np.vstack([self.frequencies, other.frequencies]),
            np.concatenate([self.coefficients, other.coefficients]),
        )

    def __sub__(self, other: TrigPoly) -> TrigPoly:
        return self + other.scale(-1.0)

    def __mul__(self, scalar: complex) -> TrigPoly:
        return self.scale(scalar)

    __rmul__ = __mul__

    def scale(self, scalar: complex) -> TrigPoly:
        return TrigPoly(self.dim, self.frequencies, self.coefficients * scalar)

    def shift(self, frequency: Iterable[int] | int) -> TrigPoly:
        """Multiply by e^{2πi η·x}."""
        eta = np.atleast_1d(np.asarray(frequency, dtype=np.int64))
        return TrigPoly(self.dim, self.frequencies + eta, self.coefficients)

    def transpose(self, axes: Iterable[int] | None = None) -> TrigPoly:
        """Permute coordinates; the default reverses them."""
        order = list(axes) if axes is not None else list(range(self.dim))[::-1]
        return TrigPoly(self.dim, self.frequencies[:, order], self.coefficients)

    def coefficient(self, frequency: Iterable[int] | int) -> complex:
        nu = np.atleast_1d(np.asarray(frequency, dtype=np.int64))
        hits = np.all(self.frequencies == nu, axis=1)
        return complex(self.coefficients[hits].sum()) if hits.any() else 0j

    def norm1(self) -> float:
        """ℓ¹ norm of the coefficients (a bound for sup |f|)."""
        return float(np.abs(self.coefficients).sum())

    def max_frequency(self) -> int:
        """Largest |ν_k| over the support, 0 for the zero polynomial."""
        return int(np.abs(self.frequencies).max()) if len(self) else 0

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at an (P, dim) array of points (1-d accepts a flat array)."""
        x = np.asarray(points, dtype=float).reshape(-1, self.dim)
        if self.is_zero():
            return np.zeros(len(x), dtype=np.complex128)
        phases = np.exp(2j * np.pi * (x @ self.frequencies.T))
        return phases @ self.coefficients

    def _check_dim(self, other: TrigPoly) -> None:
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __repr__(self) -> str:
        terms = ", ".join(
            f"{tuple(int(v) for v in nu)}: {c:.6g}"
            for nu, c in zip(self.frequencies, self.coefficients)
        )
        return f"TrigPoly(dim={self.dim}, {{{terms}}})"
