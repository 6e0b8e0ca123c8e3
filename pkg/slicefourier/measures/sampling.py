"""
Chaos-game sampling with a counter-based generator.

Sample i of a stream is a pure function of (seed, stream, i): it reads its
own block of Philox counters, so any chunking or worker layout reproduces
the same points bit for bit.
"""

from __future__ import annotations

import numpy as np

from .types import AtomicMeasure, DigitIFS, Measure, ProductMeasure

# Samples drawn per chunk when streaming large counts
CHUNK = 65536

_U64 = 2**64


def _uniforms(seed: int, stream: int, start: int, count: int, width: int) -> np.ndarray:
    """(count, width) uniforms in [0,1) for samples start..start+count-1."""
    if not 0 <= seed < _U64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    blocks = -(-width // 4)  # Philox yields four 64-bit words per counter step
    bitgen = np.random.Philox(key=(stream << 64) | seed, counter=start * blocks)
    raw = bitgen.random_raw(count * blocks * 4).reshape(count, blocks * 4)[:, :width]
    return (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53


def _draw(weights: np.ndarray, u: np.ndarray) -> np.ndarray:
    cumulative = np.cumsum(weights)
    return np.minimum(np.searchsorted(cumulative, u, side="right"), len(weights) - 1)


def chaos_digits(
    m: DigitIFS,
    count: int,
    depth: int,
    seed: int = 0,
    start: int = 0,
    stream: int = 0,
) -> np.ndarray:
    """
    Draw i.i.d. digit indices (rows of m.digits) for count samples.

    Returns:
        (count, depth) int array; column k-1 is the level-k digit.
    """
    if count < 1 or depth < 1:
        raise ValueError("count and depth must be at least 1")
    u = _uniforms(seed, stream, start, count, depth)
    return _draw(m.weights, u)


def digits_to_points(m: DigitIFS, indices: np.ndarray) -> np.ndarray:
    """Σ_k δ_k b^{-k} for rows of digit indices, summed from the deepest level."""
    digits = m.digits[indices].astype(float)  # (count, depth, dim)
    x = np.zeros((indices.shape[0], m.dim))
    for k in range(indices.shape[1] - 1, -1, -1):
        x = (digits[:, k, :] + x) / m.base
    return x


def chaos_sample(
    m: Measure,
    count: int,
    depth: int = 40,
    seed: int = 0,
    start: int = 0,
    stream: int = 0,
) -> np.ndarray:
    """
    Sample points of a measure.

    DigitIFS points are depth-level chaos-game points; atomic measures
    draw atoms; product factors use independent streams stream+1, stream+2, ...

    Returns:
        (count, dim) array of points in [0,1)^dim.
    """
    if isinstance(m, DigitIFS):
        return digits_to_points(m, chaos_digits(m, count, depth, seed, start, stream))
    if isinstance(m, AtomicMeasure):
        if count < 1:
            raise ValueError("count must be at least 1")
        u = _uniforms(seed, stream, start, count, 1)[:, 0]
        return m.points[_draw(m.weights, u)]
    if isinstance(m, ProductMeasure):
        columns = [
            chaos_sample(factor, count, depth, seed, start, stream + j + 1)
            for j, factor in enumerate(m.factors)
        ]
        return np.hstack(columns)
    raise TypeError(f"cannot sample {type(m).__name__}")


def empirical_moment(
    m: Measure,
    xi: np.ndarray,
    count: int,
    depth: int = 40,
    seed: int = 0,
) -> np.ndarray:
    """Monte Carlo estimate of μ̂ at the rows of xi from count chaos-game points."""
    xi = np.asarray(xi, dtype=float).reshape(-1, m.dim)
    total = np.zeros(len(xi), dtype=np.complex128)
    for start in range(0, count, CHUNK):
        n = min(CHUNK, count - start)
        x = chaos_sample(m, n, depth, seed, start=start)
        total += np.exp(-2j * np.pi * (x @ xi.T)).sum(axis=0)
    return total / count
