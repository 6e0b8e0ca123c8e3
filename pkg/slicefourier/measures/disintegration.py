"""
Marginals and digit-level disintegration.

For a DigitIFS on [0,1)^d, disintegrating along the last coordinate gives,
at each digit level k, the conditional law of the last digit given the
first d-1 digits at that level. A SliceLaw stores these laws along a
digit prefix of the marginal; levels deeper than the prefix follow the
stationary law of the last coordinate (its own marginal digit system).

Coordinates are 0-based throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ..errors import PrefixOutsideSupportError, ValidationError
from .moments import DEFAULT_TOL, MAX_DEPTH, moments
from .types import AtomicMeasure, DigitIFS, Measure, ProductMeasure


def _check_keep(dim: int, keep: Iterable[int]) -> list[int]:
    keep = sorted(set(int(k) for k in keep))
    if not keep or len(keep) >= dim:
        raise ValidationError("keep must be a nonempty strict subset of the coordinates")
    if keep[0] < 0 or keep[-1] >= dim:
        raise ValidationError(f"coordinates must lie in 0..{dim - 1}")
    return keep


def marginal(m: Measure, keep: Iterable[int]) -> Measure:
    """
    Push μ forward to the coordinates in `keep`.

    Args:
        m: Measure of dimension at least 2.
        keep: Nonempty strict subset of coordinate indices.

    Returns:
        A measure of dimension len(keep). DigitIFS digits are projected and
        merged with summed weights; a product keeps the chosen factors (a
        single kept factor is returned as is); atoms are projected and merged.
    """
    keep = _check_keep(m.dim, keep)
    if isinstance(m, DigitIFS):
        return DigitIFS(m.base, len(keep), m.digits[:, keep], m.weights)
    if isinstance(m, ProductMeasure):
        factors = tuple(m.factors[k] for k in keep)
        return factors[0] if len(factors) == 1 else ProductMeasure(factors)
    if isinstance(m, AtomicMeasure):
        return AtomicMeasure(m.points[:, keep], m.weights)
    raise TypeError(f"cannot take the marginal of {type(m).__name__}")


def head_marginal(m: Measure) -> Measure:
    """Marginal on the first dim-1 coordinates."""
    return marginal(m, range(m.dim - 1))


def last_coordinate(m: Measure) -> Measure:
    """Marginal on the last coordinate (the stationary slice tail)."""
    return marginal(m, [m.dim - 1])


def permute_coordinates(m: Measure, order: Sequence[int]) -> Measure:
    """Relabel coordinates: new coordinate j is old coordinate order[j]."""
    order = list(order)
    if sorted(order) != list(range(m.dim)):
        raise ValidationError(f"{order} is not a permutation of 0..{m.dim - 1}")
    if isinstance(m, DigitIFS):
        return DigitIFS(m.base, m.dim, m.digits[:, order], m.weights, name=m.name)
    if isinstance(m, ProductMeasure):
        return ProductMeasure(tuple(m.factors[k] for k in order), name=m.name)
    if isinstance(m, AtomicMeasure):
        return AtomicMeasure(m.points[:, order], m.weights, name=m.name)
    raise TypeError(f"cannot permute {type(m).__name__}")


def swap_coordinates(m: Measure, i: int = 0, j: int = 1) -> Measure:
    order = list(range(m.dim))
    order[i], order[j] = order[j], order[i]
    return permute_coordinates(m, order)


def _same_measure(a: Measure, b: Measure, tol: float) -> bool:
    if type(a) is not type(b) or a.dim != b.dim:
        return False
    if isinstance(a, DigitIFS):
        return (
            a.base == b.base
            and a.digits.shape == b.digits.shape
            and np.array_equal(a.digits, b.digits)
            and np.allclose(a.weights, b.weights, rtol=0, atol=tol)
        )
    if isinstance(a, AtomicMeasure):
        return (
            a.points.shape == b.points.shape
            and np.allclose(a.points, b.points, rtol=0, atol=tol)
            and np.allclose(a.weights, b.weights, rtol=0, atol=tol)
        )
    return all(_same_measure(x, y, tol) for x, y in zip(a.factors, b.factors))


def is_swap_symmetric(m: Measure, i: int = 0, j: int = 1, tol: float = 1e-12) -> bool:
    """True when μ is invariant under exchanging coordinates i and j."""
    return _same_measure(m, swap_coordinates(m, i, j), tol)


def conditional_laws(m: DigitIFS) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Level-wise conditional law of the last digit given the other digits.

    Returns:
        (heads, head_weights, laws): the distinct projected digit vectors
        of the first dim-1 coordinates (sorted), their marginal weights,
        and laws[s, t] = w(last digit t | head s), each row summing to 1.
    """
    if m.dim < 2:
        raise ValidationError("a slice needs a measure of dimension at least 2")
    heads, inverse = np.unique(m.digits[:, :-1], axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    head_weights = np.zeros(len(heads))
    np.add.at(head_weights, inverse, m.weights)
    laws = np.zeros((len(heads), m.base))
    np.add.at(laws, (inverse, m.digits[:, -1]), m.weights)
    return heads, head_weights, laws / head_weights[:, None]


@dataclass(frozen=True, eq=False)
class SliceLaw:
    """Disintegrated slice of a DigitIFS along a digit prefix of its marginal."""

    base: int
    prefix: np.ndarray  # (K, dim-1) head digit vectors, level 1 first
    levels: np.ndarray  # (K, base) conditional laws p_k
    tail: DigitIFS  # 1-dim stationary law for levels beyond K

    @property
    def dim(self) -> int:
        return 1

    @property
    def depth(self) -> int:
        return len(self.levels)

    def slice_moments(
        self,
        n: np.ndarray,
        tol: float = DEFAULT_TOL,
        max_depth: int = MAX_DEPTH,
    ) -> tuple[np.ndarray, np.ndarray]:
        """γ̂(n) = ∏_{k≤K} Σ_t p_k(t) e^{-2πi t n/b^k} · tail(n/b^K)."""
        n = np.asarray(n, dtype=float).reshape(-1)
        t = np.arange(self.base, dtype=float)
        values = np.ones(len(n), dtype=np.complex128)
        for k, law in enumerate(self.levels, start=1):
            values *= np.exp(-2j * np.pi * np.outer(n / float(self.base) ** k, t)) @ law
        scaled = n / float(self.base) ** self.depth
        tail_values, errors = moments(self.tail, scaled[:, None], tol, max_depth)
        return values * tail_values, errors

    def moment(self, n: float, tol: float = DEFAULT_TOL) -> complex:
        values, _ = self.slice_moments(np.array([n]), tol)
        return complex(values[0])


def slice_law(m: Measure, prefix) -> SliceLaw | Measure:
    """
    Slice of μ along its last coordinate.

    Args:
        m: Measure of dimension at least 2.
        prefix: For a DigitIFS, a (K, dim-1) sequence of head digit vectors
            (level 1 first). For an atomic measure, the point x' of the
            first dim-1 coordinates. Ignored for products.

    Returns:
        A SliceLaw for a DigitIFS, the conditional AtomicMeasure for an
        atomic measure, the last factor for a product.

    Raises:
        PrefixOutsideSupportError: a prefix digit (or point) carries no mass.
    """
    if m.dim < 2:
        raise ValidationError("a slice needs a measure of dimension at least 2")
    if isinstance(m, ProductMeasure):
        return m.factors[-1]
    if isinstance(m, AtomicMeasure):
        head = np.atleast_1d(np.asarray(prefix, dtype=float))
        hits = np.all(np.isclose(m.points[:, :-1], head, rtol=0, atol=1e-15), axis=1)
        if not hits.any():
            raise PrefixOutsideSupportError(f"no atoms above {head.tolist()}")
        weights = m.weights[hits]
        return AtomicMeasure(m.points[hits, -1:], weights / weights.sum())
    if not isinstance(m, DigitIFS):
        raise TypeError(f"cannot slice {type(m).__name__}")

    prefix = np.asarray(prefix, dtype=np.int64).reshape(-1, m.dim - 1)
    heads, _, laws = conditional_laws(m)
    levels = np.zeros((len(prefix), m.base))
    for k, digit in enumerate(prefix):
        match = np.flatnonzero(np.all(heads == digit, axis=1))
        if len(match) == 0:
            raise PrefixOutsideSupportError(
                f"level-{k + 1} digit {digit.tolist()} is outside the marginal digit set"
            )
        levels[k] = laws[match[0]]
    return SliceLaw(m.base, prefix, levels, last_coordinate(m))
