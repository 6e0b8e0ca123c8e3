"""Exact L²(μ) inner products of trigonometric polynomials."""

from __future__ import annotations

import numpy as np

from ..trigpoly import TrigPoly
from .moments import DEFAULT_TOL, moments
from .types import Measure


def trig_inner(m: Measure, p: TrigPoly, q: TrigPoly, tol: float = DEFAULT_TOL) -> tuple[complex, float]:
    """
    ⟨p, q⟩_μ = Σ_{ν,κ} p_ν conj(q_κ) μ̂(κ - ν).

    Returns:
        (value, error bound) where the bound collects moment truncation errors.
    """
    if p.dim != m.dim or q.dim != m.dim:
        raise ValueError(f"polynomial dimension does not match the measure ({m.dim})")
    if p.is_zero() or q.is_zero():
        return 0j, 0.0

    # All pairwise differences κ - ν, deduplicated before taking moments
    diffs = q.frequencies[None, :, :] - p.frequencies[:, None, :]
    unique, inverse = np.unique(diffs.reshape(-1, m.dim), axis=0, return_inverse=True)
    values, errors = moments(m, unique, tol)
    weights = np.outer(p.coefficients, np.conj(q.coefficients)).reshape(-1)
    inverse = inverse.reshape(-1)
    value = complex(np.dot(weights, values[inverse]))
    error = float(np.dot(np.abs(weights), errors[inverse]))
    return value, error


def l2_norm(m: Measure, f: TrigPoly, tol: float = DEFAULT_TOL) -> float:
    value, _ = trig_inner(m, f, f, tol)
    return float(np.sqrt(max(value.real, 0.0)))
