"""
Fourier moments μ̂(ξ) = ∫ e^{-2πi ξ·x} dμ.

For a DigitIFS the moment is the infinite product

    μ̂(ξ) = ∏_{k≥1} m(ξ / b^k),   m(η) = Σ_δ w_δ e^{-2πi δ·η},

cut at the first level K whose tail bound Σ_{k>K} 2π‖ξ‖₁(b-1)/b^k
= 2π‖ξ‖₁ b^{-K} is below the requested tolerance. Atomic moments are
finite sums (error 0); product moments multiply factor moments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable

import numpy as np
from scipy.linalg import toeplitz

from ..errors import MissingMomentError, NonconvergentToleranceError, ValidationError
from .types import AtomicMeasure, DigitIFS, ProductMeasure

DEFAULT_TOL = 1e-12

# Truncation depth cap for the infinite product
MAX_DEPTH = 2048


def truncation_depth(base: int, l1: float, tol: float, max_depth: int = MAX_DEPTH) -> int:
    """Smallest K with 2π·l1·base^{-K} ≤ tol."""
    if tol <= 0:
        raise ValidationError(f"tolerance must be positive, got {tol}")
    if l1 == 0:
        return 0
    depth = max(0, math.ceil(math.log(2 * math.pi * l1 / tol, base)))
    # Guard against log rounding one level short
    while 2 * math.pi * l1 * float(base) ** (-depth) > tol:
        depth += 1
    if depth > max_depth:
        raise NonconvergentToleranceError(
            f"moment at |ξ|₁={l1:g} needs {depth} levels for tolerance {tol:g} "
            f"(cap {max_depth})"
        )
    return depth


def _canonical(xi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Flip rows whose first nonzero entry is negative; return the flip mask."""
    nonzero = xi != 0
    first = np.argmax(nonzero, axis=1)
    lead = xi[np.arange(len(xi)), first]
    flipped = lead < 0
    return np.where(flipped[:, None], -xi, xi), flipped


def _digit_ifs_moments(m: DigitIFS, xi: np.ndarray, tol: float, max_depth: int):
    l1 = np.abs(xi).sum(axis=1)
    depth = truncation_depth(m.base, float(l1.max(initial=0.0)), tol, max_depth)
    values = np.ones(len(xi), dtype=np.complex128)
    for k in range(1, depth + 1):
        values *= m.digit_polynomial(xi / float(m.base) ** k)
    errors = 2 * math.pi * l1 * float(m.base) ** (-depth)
    return values, errors


def _atomic_moments(m: AtomicMeasure, xi: np.ndarray):
    values = np.exp(-2j * np.pi * (xi @ m.points.T)) @ m.weights
    return values, np.zeros(len(xi))


def _product_moments(m: ProductMeasure, xi: np.ndarray, tol: float, max_depth: int):
    values = np.ones(len(xi), dtype=np.complex128)
    errors = np.zeros(len(xi))
    for j, factor in enumerate(m.factors):
        v, e = moments(factor, xi[:, j : j + 1], tol / m.dim, max_depth=max_depth)
        values *= v
        errors += e
    return values, errors


def moments(
    source: Any,
    xi: np.ndarray,
    tol: float = DEFAULT_TOL,
    max_depth: int = MAX_DEPTH,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Vectorized moments of a measure (or any source with a `moments` method).

    Args:
        source: DigitIFS, AtomicMeasure, ProductMeasure or SliceLaw.
        xi: (M, dim) array of real or integer frequencies.
        tol: Per-entry truncation tolerance.
        max_depth: Depth cap for infinite products.

    Returns:
        (values, error_bounds), both of length M. μ̂(0) is exactly 1 and
        μ̂(-ξ) is exactly conj(μ̂(ξ)).
    """
    xi = np.asarray(xi, dtype=float).reshape(-1, source.dim)
    if len(xi) == 0:
        return np.zeros(0, dtype=np.complex128), np.zeros(0)

    canon, flipped = _canonical(xi)
    if isinstance(source, DigitIFS):
        values, errors = _digit_ifs_moments(source, canon, tol, max_depth)
    elif isinstance(source, AtomicMeasure):
        values, errors = _atomic_moments(source, canon)
    elif isinstance(source, ProductMeasure):
        values, errors = _product_moments(source, canon, tol, max_depth)
    elif hasattr(source, "slice_moments"):
        values, errors = source.slice_moments(canon[:, 0], tol, max_depth)
    else:
        raise TypeError(f"cannot take moments of {type(source).__name__}")

    zero = ~np.any(xi != 0, axis=1)
    values = np.where(zero, 1.0 + 0j, values)
    errors = np.where(zero, 0.0, errors)
    return np.where(flipped, np.conj(values), values), errors


def moment(source: Any, xi: Iterable[float] | float, tol: float = DEFAULT_TOL) -> tuple[complex, float]:
    """Single moment μ̂(ξ) with its truncation error bound."""
    values, errors = moments(source, np.atleast_1d(np.asarray(xi, dtype=float)), tol)
    return complex(values[0]), float(errors[0])


@dataclass(frozen=True, eq=False)
class MomentTable:
    """Cached moments of a source measure at a fixed set of frequencies."""

    source: Any
    frequencies: np.ndarray  # (M, dim)
    values: np.ndarray  # (M,)
    errors: np.ndarray  # (M,)
    tol: float
    _index: dict[tuple[float, ...], int] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self._index.update(
            {tuple(float(v) for v in row): i for i, row in enumerate(self.frequencies)}
        )

    @property
    def dim(self) -> int:
        return self.frequencies.shape[1]

    def _lookup(self, xi: Iterable[float] | float) -> int:
        key = tuple(float(v) for v in np.atleast_1d(xi))
        try:
            return self._index[key]
        except KeyError:
            raise MissingMomentError(f"moment at ξ={key} not in table") from None

    def __getitem__(self, xi: Iterable[float] | float) -> complex:
        return complex(self.values[self._lookup(xi)])

    def __contains__(self, xi: Iterable[float] | float) -> bool:
        return tuple(float(v) for v in np.atleast_1d(xi)) in self._index

    def error(self, xi: Iterable[float] | float) -> float:
        return float(self.errors[self._lookup(xi)])

    def sequence(self, nmax: int) -> np.ndarray:
        """Values at n = -nmax..nmax for a 1-dim table (index n + nmax)."""
        if self.dim != 1:
            raise ValueError("sequence() needs a 1-dim moment table")
        return np.array([self[n] for n in range(-nmax, nmax + 1)])

    def max_error(self) -> float:
        return float(self.errors.max(initial=0.0))


def moment_table(
    source: Any,
    frequencies: np.ndarray | None = None,
    *,
    nmax: int | None = None,
    tol: float = DEFAULT_TOL,
) -> MomentTable:
    """
    Build a MomentTable.

    Either pass explicit frequencies, or nmax to take every integer vector
    with sup-norm at most nmax (n = -nmax..nmax in one dimension).
    """
    if frequencies is None:
        if nmax is None or nmax < 0:
            raise ValueError("moment_table needs frequencies or nmax >= 0")
        axis = np.arange(-nmax, nmax + 1)
        grid = np.stack(np.meshgrid(*[axis] * source.dim, indexing="ij"), axis=-1)
        frequencies = grid.reshape(-1, source.dim)
    xi = np.asarray(frequencies, dtype=float).reshape(-1, source.dim)
    values, errors = moments(source, xi, tol)
    return MomentTable(source, xi, values, errors, tol)


def moment_gram(source: Any, n: int, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Gram matrix [⟨e_k, e_j⟩] = [μ̂(j-k)] of the exponentials e_0..e_n."""
    table = moment_table(source, nmax=n, tol=tol)
    seq = table.sequence(n)
    # G[k, j] = μ̂(j - k): column 0 holds μ̂(-k), row 0 holds μ̂(j)
    return toeplitz(seq[n::-1], seq[n:])
