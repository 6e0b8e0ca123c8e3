"""
Kaczmarz auxiliary sequences.

For the exponentials e_n(x) = e^{2πinx} in L²(μ) the auxiliary sequence is

    g_0 = e_0,   g_n = e_n - Σ_{k<n} ⟨e_n, e_k⟩ g_k,   ⟨e_n, e_k⟩ = μ̂(k - n).

Writing g_n = Σ_{k≤n} A[n, k] e_k gives a unit lower-triangular matrix A
with T·A = I, where T[n, j] = conj(μ̂(n - j)) is lower-triangular Toeplitz.
The Fourier coefficients of f are ⟨f, g_n⟩ = Σ_k conj(A[n, k]) ⟨f, e_k⟩.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.linalg import toeplitz

from .errors import DimensionTooSmallError, ValidationError
from .measures import (
    DEFAULT_TOL,
    AtomicMeasure,
    DigitIFS,
    Measure,
    MomentTable,
    ProductMeasure,
    chaos_digits,
    head_marginal,
    moment_table,
    slice_law,
    trig_inner,
)
from .trigpoly import TrigPoly

# Largest order accepted by the operator report
MAX_OPERATOR_ORDER = 64


def forward_substitute(sequences: np.ndarray, n: int) -> np.ndarray:
    """
    Run the Kaczmarz recursion for a batch of moment sequences.

    Args:
        sequences: (..., 2n+1) arrays holding μ̂(-n..n), index j ↔ j - n.
        n: Order.

    Returns:
        (..., n+1, n+1) unit lower-triangular coefficient matrices.
    """
    sequences = np.asarray(sequences, dtype=np.complex128)
    batch = sequences.shape[:-1]
    a = np.zeros(batch + (n + 1, n + 1), dtype=np.complex128)
    for r in range(n + 1):
        a[..., r, r] = 1.0
        if r:
            # ⟨e_r, e_k⟩ = μ̂(k - r) for k = 0..r-1
            inner = sequences[..., n - r : n]
            a[..., r, :] -= np.einsum("...k,...kj->...j", inner, a[..., :r, :])
    return a


@dataclass(frozen=True, eq=False)
class AuxMatrix:
    """Coefficients of g_0..g_N in the exponentials e_0..e_N."""

    matrix: np.ndarray  # (N+1, N+1), unit lower triangular
    moments: MomentTable | None = None

    @property
    def order(self) -> int:
        return self.matrix.shape[0]

    @property
    def n(self) -> int:
        return self.order - 1

    def row(self, n: int) -> TrigPoly:
        """g_n as a one-dimensional trig polynomial."""
        freqs = np.arange(n + 1).reshape(-1, 1)
        return TrigPoly(1, freqs, self.matrix[n, : n + 1])

    def toeplitz_factor(self) -> np.ndarray:
        """T[n, j] = conj(μ̂(n - j)) for n ≥ j, zero above the diagonal."""
        seq = self.moments.sequence(self.n)
        column = np.conj(seq[self.n :])  # conj(μ̂(0..N))
        return toeplitz(column, np.zeros(self.order))

    def consistency_residual(self) -> float:
        """max |T·A - I|."""
        product = self.toeplitz_factor() @ self.matrix
        return float(np.abs(product - np.eye(self.order)).max())

    def row_norms(self) -> np.ndarray:
        """‖g_n‖ in L²(μ), computed from the moments."""
        seq = self.moments.sequence(self.n)
        gram = toeplitz(seq[self.n :: -1], seq[self.n :])  # G[k, j] = μ̂(j - k)
        quad = np.einsum("nk,kj,nj->n", self.matrix, gram, np.conj(self.matrix))
        return np.sqrt(np.maximum(quad.real, 0.0))

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"order": self.n, "matrix": self.matrix}
        if self.moments is not None:
            data["consistency_residual"] = self.consistency_residual()
            data["row_norms"] = self.row_norms()
        return data


def aux_matrix(moments: MomentTable, n: int) -> AuxMatrix:
    """
    Auxiliary matrix of order n+1 from a one-dimensional moment table.

    Raises:
        MissingMomentError: the table lacks some μ̂(k) with |k| ≤ n.
    """
    if n < 0:
        raise ValueError(f"order must be non-negative, got {n}")
    return AuxMatrix(forward_substitute(moments.sequence(n), n), moments)


def slice_aux(slice_measure: Any, n: int, tol: float = DEFAULT_TOL) -> AuxMatrix:
    """Auxiliary matrix of a slice (SliceLaw or one-dimensional measure)."""
    return aux_matrix(moment_table(slice_measure, nmax=n, tol=tol), n)


def table_for(source: Any, f: TrigPoly, n: int, tol: float = DEFAULT_TOL) -> MomentTable:
    """Moment table wide enough for coefficients of f up to order n."""
    return moment_table(source, nmax=n + 2 * f.max_frequency(), tol=tol)


def exponential_products(moments: MomentTable, f: TrigPoly, n: int) -> np.ndarray:
    """⟨f, e_k⟩ = Σ_ν f_ν μ̂(k - ν) for k = 0..n."""
    out = np.zeros(n + 1, dtype=np.complex128)
    for nu, c in zip(f.frequencies[:, 0], f.coefficients):
        out += c * np.array([moments[k - nu] for k in range(n + 1)])
    return out


def aux_coefficients(
    moments: MomentTable,
    f: TrigPoly,
    n: int,
    aux: AuxMatrix | None = None,
) -> np.ndarray:
    """Fourier coefficients ⟨f, g_k⟩ for k = 0..n."""
    if f.dim != 1:
        raise ValueError("aux_coefficients takes a one-dimensional polynomial")
    aux = aux if aux is not None else aux_matrix(moments, n)
    return np.conj(aux.matrix[: n + 1, : n + 1]) @ exponential_products(moments, f, n)


def kaczmarz_iterates(moments: MomentTable, f: TrigPoly, n: int) -> np.ndarray:
    """
    Row-action Kaczmarz projections f_k = f_{k-1} + ⟨f - f_{k-1}, e_k⟩ e_k.

    Returns:
        (n+1, n+1) array; row k holds the coefficients of f_k on e_0..e_n,
        which equal ⟨f, g_j⟩ for j ≤ k.
    """
    targets = exponential_products(moments, f, n)
    seq = moments.sequence(n)
    iterates = np.zeros((n + 1, n + 1), dtype=np.complex128)
    current = np.zeros(n + 1, dtype=np.complex128)
    for k in range(n + 1):
        # ⟨f_{k-1}, e_k⟩ = Σ_j a_j μ̂(k - j)
        projected = np.dot(current[:k], seq[n + k - np.arange(k)]) if k else 0j
        current = current.copy()
        current[k] += targets[k] - projected
        iterates[k] = current
    return iterates


@dataclass(frozen=True)
class ParsevalDefect:
    """Partial sums s_n = Σ_{k≤n} |⟨f, g_k⟩|² against ‖f‖²."""

    partial_sums: np.ndarray
    norm_squared: float
    defect: float


def parseval_defect(moments: MomentTable, f: TrigPoly, n: int) -> ParsevalDefect:
    coeffs = aux_coefficients(moments, f, n)
    partial = np.cumsum(np.abs(coeffs) ** 2)
    norm_sq = trig_inner(moments.source, f, f, moments.tol)[0].real
    return ParsevalDefect(partial, norm_sq, float(norm_sq - partial[-1]))


@dataclass(frozen=True, eq=False)
class OperatorKaczmarzReport:
    """Finite section of (I+M)(I+U) = I over sampled slices."""

    order: int
    identity_plus_m: np.ndarray  # (S, N+1, N+1)
    identity_plus_u: np.ndarray  # (S, N+1, N+1)
    residual: float
    isometry_defect: float
    test_size: int
    tail_estimate: float = 0.0  # max_x Σ_{N-L<k≤256} |b^x_k|²

    @property
    def slice_count(self) -> int:
        return self.identity_plus_m.shape[0]

    def to_dict(self) -> dict[str, Any]:
        return {
            "order": self.order,
            "slices": self.slice_count,
            "residual": self.residual,
            "isometry_defect": self.isometry_defect,
            "tail_estimate": self.tail_estimate,
            "test_size": self.test_size,
        }


def _slice_tables(m: Measure, n: int, prefixes: int, depth: int, seed: int, tol: float):
    if isinstance(m, ProductMeasure):
        return [moment_table(m.factors[-1], nmax=n, tol=tol)]
    if isinstance(m, AtomicMeasure):
        heads = np.unique(m.points[:, :-1], axis=0)
        return [moment_table(slice_law(m, h), nmax=n, tol=tol) for h in heads]
    if isinstance(m, DigitIFS):
        head = head_marginal(m)
        rows = chaos_digits(head, prefixes, depth, seed)
        return [moment_table(slice_law(m, head.digits[r]), nmax=n, tol=tol) for r in rows]
    raise TypeError(f"cannot slice {type(m).__name__}")


def _inner_tail(tables: list[MomentTable], start: int, tol: float) -> float:
    """Largest ‖b^x_k‖² mass over start ≤ k ≤ 256 among the slices."""
    from .transforms import MODEL_ORDER, slice_inner_function

    tail = 0.0
    for table in tables:
        beta = slice_inner_function(table, MODEL_ORDER, tol).coefficients
        tail = max(tail, float(np.sum(np.abs(beta[start:]) ** 2)))
    return tail


def operator_kaczmarz_report(
    m: Measure,
    n: int,
    prefixes: int = 64,
    depth: int = 12,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
) -> OperatorKaczmarzReport:
    """
    Operator Kaczmarz diagnostics along the last coordinate.

    R(j)R(k)* acts on L²(marginal) as multiplication by γ̂^x(j - k), so the
    strictly lower block matrix M is a field of Toeplitz matrices over slice
    points x. I+U is taken from the slice auxiliary recursion (conj(A)),
    -U acts as multiplication by the slice inner function b^x.

    The isometry defect over e_0..e_L, L = N // 4, is 1 - ‖b^x_{≤N-L}‖² on
    singular slices, so it only shrinks with N. tail_estimate is the part
    of that mass a series carried to order 256 recovers.

    Args:
        m: Measure of dimension at least 2.
        n: Truncation order (at most 64).
        prefixes: Number of sampled marginal digit prefixes (DigitIFS).
        depth: Digit depth of each sampled prefix.
        seed: Sampling seed.
        tol: Moment tolerance.
    """
    if m.dim < 2:
        raise DimensionTooSmallError(f"operator report needs dim >= 2, got {m.dim}")
    if not 0 <= n <= MAX_OPERATOR_ORDER:
        raise ValidationError(f"order must lie in 0..{MAX_OPERATOR_ORDER}, got {n}")

    tables = _slice_tables(m, n, prefixes, depth, seed, tol)
    sequences = np.stack([t.sequence(n) for t in tables])
    plus_u = np.conj(forward_substitute(sequences, n))

    # (I+M)[j, k] = γ̂(j - k) on and below the diagonal
    plus_m = np.stack([toeplitz(seq[n:], np.zeros(n + 1)) for seq in sequences])
    plus_m[:, np.arange(n + 1), np.arange(n + 1)] = 1.0

    identity = np.eye(n + 1)
    residual = float(np.abs(plus_m @ plus_u - identity).max())

    # column j of U holds -b^x_{0..N-j}; its norm misses the orders past N-j
    test_size = n // 4 + 1
    u = plus_u - identity
    column_norms = (np.abs(u[:, :, :test_size]) ** 2).sum(axis=1)
    defect = float(np.abs(1.0 - column_norms).max())
    tail = _inner_tail(tables, n - test_size + 2, tol)
    return OperatorKaczmarzReport(n + 1, plus_m, plus_u, residual, defect, test_size, tail)
