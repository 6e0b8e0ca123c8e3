"""
Cauchy transforms, inner functions and Normalized Cauchy Transforms.

In one variable the Normalized Cauchy Transform of f is the power series
V_μ(f)(w) = Σ ⟨f, g_n⟩ w^n = C_μ(f)(w) / C_μ(1)(w), and the inner function
of μ is b(w) = 1 - 1/C_μ(1)(w). In several variables V_μ(f) is the power
series on the polydisk whose coefficients are the slice expansion
coefficients of f.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import (
    DimensionTooSmallError,
    NotSymmetricError,
    PointOutsideDiskError,
    RadiusTooCloseError,
    SingularReciprocalError,
    ValidationError,
)
from .expansion import CoeffTensor, analyze, analyze_staged
from .kaczmarz import aux_coefficients, table_for
from .measures import (
    DEFAULT_TOL,
    AtomicMeasure,
    DigitIFS,
    Measure,
    MomentTable,
    ProductMeasure,
    chaos_digits,
    digits_to_points,
    head_marginal,
    is_swap_symmetric,
    l2_norm,
    marginal,
    moment_gram,
    moments,
    slice_law,
    swap_coordinates,
    trig_inner,
)
from .quadrature import QuadratureSpec
from .trigpoly import TrigPoly

# Largest modulus accepted for disk evaluations
R_MAX = 0.999

# Truncation tolerance of disk evaluations
EVAL_TOL = 1e-12

# Smallest internal order of the slice series in the model-space check
MODEL_ORDER = 256

BOUNDARY_TOL = 1e-4
EQUALITY_TOL = 1e-8


def _check_disk(w: complex) -> float:
    r = abs(w)
    if r > R_MAX:
        raise PointOutsideDiskError(f"|w| = {r:.6g} exceeds {R_MAX}")
    return r


def _series_order(r: float, scale: float, tol: float) -> int:
    """Smallest M with scale·r^{M+1}/(1-r) ≤ tol."""
    if r == 0 or scale == 0:
        return 0
    return max(0, math.ceil(math.log(tol * (1 - r) / scale) / math.log(r)) - 1)


def _moment_range(source: Any, lo: int, hi: int, tol: float) -> np.ndarray:
    values, _ = moments(source, np.arange(lo, hi + 1, dtype=float)[:, None], tol)
    return values


@dataclass(frozen=True, eq=False)
class PowerSeriesGrid:
    """Truncated power series Σ c_n z_1^{n_1}···z_d^{n_d} on the polydisk."""

    orders: tuple[int, ...]
    coefficients: np.ndarray
    quadrature: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_tensor(cls, c: CoeffTensor) -> PowerSeriesGrid:
        return cls(c.orders, c.values, dict(c.quadrature))

    @property
    def dim(self) -> int:
        return len(self.orders)

    def norm(self) -> float:
        """ℓ² norm of the coefficients."""
        return float(np.sqrt(np.sum(np.abs(self.coefficients) ** 2)))

    def evaluate(self, z: np.ndarray) -> np.ndarray:
        """Evaluate at (P, d) complex points of the polydisk."""
        z = np.asarray(z, dtype=np.complex128).reshape(-1, self.dim)
        if z.size and np.abs(z).max() > R_MAX:
            raise PointOutsideDiskError(f"points must satisfy |z| <= {R_MAX}")
        tensor = np.broadcast_to(self.coefficients, (len(z),) + self.coefficients.shape)
        for j in reversed(range(self.dim)):
            powers = z[:, j : j + 1] ** np.arange(self.orders[j] + 1)
            tensor = np.einsum("p...n,pn->p...", tensor, powers)
        return tensor

    def on_torus(self, radii: Sequence[float]) -> TrigPoly:
        """The trig polynomial x ↦ V(r_1 e^{2πix_1}, ..., r_d e^{2πix_d})."""
        scale = np.ones_like(self.coefficients, dtype=float)
        for j, r in enumerate(radii):
            shape = [1] * self.dim
            shape[j] = -1
            scale = scale * (float(r) ** np.arange(self.orders[j] + 1)).reshape(shape)
        c = CoeffTensor(self.orders, self.coefficients * scale)
        return c.partial_sum()


def polydisk_grid(radius: float, counts: Sequence[int]) -> np.ndarray:
    """Points r·e^{2πi k/count} on a product grid, shape (P, d)."""
    _check_disk(radius)
    axes = [radius * np.exp(2j * np.pi * np.arange(n) / n) for n in counts]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=-1)


def cauchy_transform(m: Any, f: TrigPoly, w: complex, tol: float = EVAL_TOL) -> complex:
    """
    C_μ(f)(w) = ∫ f(x) / (1 - w e^{-2πix}) dμ(x) for a one-dimensional μ.

    Summed as Σ_n (Σ_ν f_ν μ̂(n - ν)) w^n up to the order where the
    geometric tail ‖f‖₁|w|^{M+1}/(1-|w|) drops below tol.

    Raises:
        PointOutsideDiskError: |w| > 0.999.
    """
    if m.dim != 1 or f.dim != 1:
        raise ValidationError("the Cauchy transform takes one-dimensional inputs")
    r = _check_disk(w)
    if f.is_zero():
        return 0j
    order = _series_order(r, f.norm1(), tol)
    nu = f.frequencies[:, 0]
    lo, hi = -int(nu.max()), order - int(nu.min())
    values = _moment_range(m, lo, hi, tol)
    n = np.arange(order + 1)
    # Σ_ν f_ν μ̂(n - ν)
    series = np.zeros(order + 1, dtype=np.complex128)
    for v, c in zip(nu, f.coefficients):
        series += c * values[n - v - lo]
    return complex(np.polynomial.polynomial.polyval(w, series))


def herglotz_transform(m: Any, w: complex, tol: float = EVAL_TOL) -> complex:
    """∫ (1 + w e^{-2πix}) / (1 - w e^{-2πix}) dμ = 2 C_μ(1)(w) - 1."""
    return 2 * cauchy_transform(m, TrigPoly.constant(1), w, tol) - 1


def reciprocal_series(c: np.ndarray) -> np.ndarray:
    """Taylor coefficients of 1/C from those of C, by triangular recursion."""
    c = np.asarray(c, dtype=np.complex128)
    if abs(c[0]) < 1e-14:
        raise SingularReciprocalError("C(0) vanishes; the series has no reciprocal")
    r = np.zeros_like(c)
    r[0] = 1.0 / c[0]
    for n in range(1, len(c)):
        r[n] = -np.dot(c[1 : n + 1], r[n - 1 :: -1]) / c[0]
    return r


@dataclass(frozen=True, eq=False)
class InnerFunctionSeries:
    """Taylor coefficients of b(w) = 1 - 1/C_μ(1)(w) up to order N."""

    coefficients: np.ndarray
    source: Any
    tol: float = DEFAULT_TOL

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def evaluate_truncated(self, w: complex) -> complex:
        return complex(np.polynomial.polynomial.polyval(w, self.coefficients))

    def evaluate(self, w: complex) -> complex:
        """b(w) with C_μ(1) summed to its own tail-bounded order."""
        c = cauchy_transform(self.source, TrigPoly.constant(1), w, EVAL_TOL)
        if c == 0:
            raise SingularReciprocalError(f"C(1) vanishes at {w}")
        return 1 - 1 / c

    def herglotz_residual(self, points: Iterable[complex]) -> float:
        """
        max |(1 + b)/(1 - b) - (2 C_μ(1) - 1)| over the points, with b the
        stored Taylor polynomial; points should sit well inside the disk.
        """
        worst = 0.0
        for w in points:
            b = self.evaluate_truncated(w)
            lhs = (1 + b) / (1 - b)
            worst = max(worst, abs(lhs - herglotz_transform(self.source, w)))
        return worst

    def to_dict(self) -> dict[str, Any]:
        return {"order": self.order, "coefficients": self.coefficients}


def inner_function(m: Any, n: int, tol: float = DEFAULT_TOL) -> InnerFunctionSeries:
    """Inner function of a one-dimensional measure (or slice law) to order n."""
    if m.dim != 1:
        raise ValidationError("inner functions are defined for one-dimensional measures")
    c = _moment_range(m, 0, n, tol)
    b = -reciprocal_series(c)
    b[0] += 1.0
    return InnerFunctionSeries(b, m, tol)


def slice_inner_function(slice_measure: Any, n: int, tol: float = DEFAULT_TOL) -> InnerFunctionSeries:
    """
    Inner function b^x of a slice; multiplication by it is the slice block of -U.

    Takes a SliceLaw, a one-dimensional measure, or a MomentTable of either.
    """
    if isinstance(slice_measure, MomentTable):
        slice_measure = slice_measure.source
    return inner_function(slice_measure, n, tol)


def nct_1d(m: Measure, f: TrigPoly, n: int, tol: float = DEFAULT_TOL) -> PowerSeriesGrid:
    """V_μ(f)(w) = Σ_{k≤n} ⟨f, g_k⟩ w^k."""
    if m.dim != 1:
        raise ValidationError("nct_1d takes a one-dimensional measure")
    coefficients = aux_coefficients(table_for(m, f, n, tol), f, n)
    return PowerSeriesGrid((n,), coefficients, {"mode": "exact", "error_estimate": 0.0})


def backward_shift_residual(m: Measure, f: TrigPoly, n: int, tol: float = DEFAULT_TOL) -> float:
    """
    max_k |⟨f, g_{k+1}⟩ - ⟨e_{-1}(f - ⟨f,1⟩), g_k⟩| for k ≤ n: the backward
    shift of V_μ(f) is V_μ of the shifted, mean-removed function.
    """
    table = table_for(m, f, n + 2, tol)
    left = aux_coefficients(table, f, n + 1)[1:]
    mean = trig_inner(m, f, TrigPoly.constant(1), tol)[0]
    shifted = (f - TrigPoly.constant(1, mean)).shift(-1)
    if shifted.is_zero():
        return float(np.abs(left).max())
    right = aux_coefficients(table_for(m, shifted, n, tol), shifted, n)
    return float(np.abs(left - right).max())


def nct_d(
    m: Measure,
    f: TrigPoly,
    orders: Sequence[int] | None = None,
    q: QuadratureSpec | None = None,
    *,
    tol: float = DEFAULT_TOL,
    workers: int = 1,
) -> PowerSeriesGrid:
    """Polydisk transform whose coefficients are the slice expansion coefficients."""
    return PowerSeriesGrid.from_tensor(analyze(m, f, orders, q, tol=tol, workers=workers))


def nct_staged(
    m: Measure,
    f: TrigPoly,
    orders: Sequence[int] | None = None,
    q: QuadratureSpec | None = None,
    *,
    tol: float = DEFAULT_TOL,
    workers: int = 1,
) -> PowerSeriesGrid:
    """The same transform as a composition: slice transform first, marginal last."""
    return PowerSeriesGrid.from_tensor(analyze_staged(m, f, orders, q, tol=tol, workers=workers))


# Model spaces


@dataclass(frozen=True)
class ModelSpaceReport:
    residual: float  # max_x,k |⟨V_x(f), b^x w^k⟩|
    tail_bound: float
    slices: int
    order: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "residual": self.residual,
            "tail_bound": self.tail_bound,
            "slices": self.slices,
            "order": self.order,
        }


def _sampled_slices(m: Measure, prefixes: int, depth: int, seed: int):
    """(x_1, slice law) pairs along the first coordinate."""
    if isinstance(m, ProductMeasure):
        factor = m.factors[0]
        if isinstance(factor, AtomicMeasure):
            xs = factor.points[:, 0]
        else:
            rows = chaos_digits(factor, prefixes, depth, seed)
            xs = digits_to_points(factor, rows)[:, 0]
        return [(float(x), m.factors[1]) for x in xs]
    if isinstance(m, AtomicMeasure):
        heads = np.unique(m.points[:, 0])
        return [(float(x), slice_law(m, [x])) for x in heads]
    if isinstance(m, DigitIFS):
        head = head_marginal(m)
        rows = chaos_digits(head, prefixes, depth, seed)
        xs = digits_to_points(head, rows)[:, 0]
        return [(float(x), slice_law(m, head.digits[r])) for x, r in zip(xs, rows)]
    raise TypeError(f"cannot slice {type(m).__name__}")


def _restrict(f: TrigPoly, x: float) -> TrigPoly:
    """y ↦ f(x, y) as a one-dimensional polynomial."""
    phases = np.exp(2j * np.pi * f.frequencies[:, 0] * x)
    return TrigPoly(1, f.frequencies[:, 1:], f.coefficients * phases)


def model_space_residual(
    m: Measure,
    f: TrigPoly,
    orders: int = 16,
    prefixes: int = 16,
    depth: int = 12,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
) -> ModelSpaceReport:
    """
    Check that each slice transform of f lies in the model space H(b^x).

    For sampled x, v = V_{γ^x}(f(x, ·)) must be orthogonal in H² to
    b^x·w^k; residuals are taken for k ≤ orders with both series carried
    to order M = max(orders, 256). The tail bound covers the terms beyond M.
    """
    if m.dim < 2:
        raise DimensionTooSmallError(f"model-space residual needs dim 2, got {m.dim}")
    if m.dim > 2:
        raise ValidationError("model-space residual is defined for two-dimensional measures")

    order = max(orders, MODEL_ORDER)
    worst, tail = 0.0, 0.0
    pairs = _sampled_slices(m, prefixes, depth, seed)
    for x, law in pairs:
        local = _restrict(f, x)
        if local.is_zero():
            continue
        v = aux_coefficients(table_for(law, local, order, tol), local, order)
        beta = slice_inner_function(law, order, tol).coefficients
        for k in range(orders + 1):
            worst = max(worst, abs(np.dot(v[k:], np.conj(beta[: order + 1 - k]))))
        defect = max(trig_inner(law, local, local, tol)[0].real - np.sum(np.abs(v) ** 2), 0.0)
        beta_tail = max(1.0 - np.sum(np.abs(beta[: order - orders + 1]) ** 2), 0.0)
        tail = max(tail, math.sqrt(defect * beta_tail))
    return ModelSpaceReport(worst, tail, len(pairs), order)


# Disintegration-order diagnostics


@dataclass(frozen=True)
class EqualityReport:
    equal: bool
    deviation: float
    tolerance: float

    def to_dict(self) -> dict[str, Any]:
        return {"equal": self.equal, "deviation": self.deviation, "tolerance": self.tolerance}


def _other_order(m, f, orders, q, tol, workers, staged=False) -> CoeffTensor:
    """Coefficients with x_1 sliced last: transpose of the swapped problem."""
    run = analyze_staged if staged else analyze
    swapped = run(swap_coordinates(m), f.transpose(), tuple(orders)[::-1], q, tol=tol, workers=workers)
    return swapped.transpose()


def _tolerance(*tensors: CoeffTensor) -> float:
    return max([EQUALITY_TOL] + [t.quadrature.get("error_estimate", 0.0) for t in tensors])


def nct_equality_test(
    m: Measure,
    fs: Iterable[TrigPoly],
    orders: Sequence[int] = (8, 8),
    q: QuadratureSpec | None = None,
    *,
    tol: float = DEFAULT_TOL,
    workers: int = 1,
) -> EqualityReport:
    """
    Compare the transforms from the two disintegration orders of a 2-d μ.

    They agree for product measures; the report flags inequality when the
    deviation exceeds ten times the quadrature tolerance.
    """
    if m.dim != 2:
        raise ValidationError("the equality test is defined for two-dimensional measures")
    deviation, tolerance = 0.0, EQUALITY_TOL
    for f in fs:
        first = analyze(m, f, orders, q, tol=tol, workers=workers)
        second = _other_order(m, f, orders, q, tol, workers)
        deviation = max(deviation, float(np.abs(first.values - second.values).max()))
        tolerance = max(tolerance, _tolerance(first, second))
    return EqualityReport(deviation <= 10 * tolerance, deviation, tolerance)


def symmetry_reflection_test(
    m: Measure,
    fs: Iterable[TrigPoly],
    orders: Sequence[int] = (8, 8),
    q: QuadratureSpec | None = None,
    *,
    tol: float = DEFAULT_TOL,
    workers: int = 1,
) -> float:
    """
    max deviation between V¹(f) and T'∘V²∘T(f) for a swap-symmetric μ,
    with T swapping the arguments of f and T' transposing coefficients.

    V¹ runs the direct quadrature on μ; V² runs the staged composition on
    the swapped measure, so the two sides go through different kernels.

    Raises:
        NotSymmetricError: μ changes under the coordinate swap.
    """
    if m.dim != 2:
        raise ValidationError("the reflection test is defined for two-dimensional measures")
    if not is_swap_symmetric(m):
        raise NotSymmetricError(f"{m!r} is not invariant under swapping its coordinates")
    orders = tuple(orders)
    deviation = 0.0
    for f in fs:
        first = analyze(m, f, orders, q, tol=tol, workers=workers)
        reflected = _other_order(m, f.transpose(), orders[::-1], q, tol, workers, staged=True).transpose()
        deviation = max(deviation, float(np.abs(first.values - reflected.values).max()))
    return deviation


# Boundary behavior


def _exact_after(measure: Any, n: int) -> bool:
    """Coefficients of order > n vanish: few orthonormal atoms."""
    if not isinstance(measure, AtomicMeasure):
        return False
    count = len(measure.weights)
    if n + 1 < count:
        return False
    gram = moment_gram(measure, count - 1)
    return bool(np.allclose(gram, np.eye(count), rtol=0, atol=1e-12))


def _coordinate_exact(m: Measure, j: int, n: int) -> bool:
    if isinstance(m, ProductMeasure):
        return _exact_after(m.factors[j], n)
    if isinstance(m, AtomicMeasure):
        if j == 0:
            return _exact_after(marginal(m, [0]), n)
        heads = np.unique(m.points[:, 0])
        return all(_exact_after(slice_law(m, [x]), n) for x in heads)
    return False


@dataclass(frozen=True)
class BoundaryReport:
    rows: list[tuple[float, float, float]]  # (r1, r2, error), r2 outer
    iterated: list[tuple[float, float]]  # (r2, error) at the largest r1
    tail_bound: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "rows": [{"r1": a, "r2": b, "error": e} for a, b, e in self.rows],
            "iterated": [{"r2": r, "error": e} for r, e in self.iterated],
            "tail_bound": self.tail_bound,
        }


def boundary_limit_test(
    m: Measure,
    f: TrigPoly,
    radii: Sequence[float] = (0.5, 0.9, 0.99),
    orders: Sequence[int] | None = None,
    q: QuadratureSpec | None = None,
    *,
    tol: float = BOUNDARY_TOL,
    moment_tol: float = DEFAULT_TOL,
    workers: int = 1,
) -> BoundaryReport:
    """
    ‖V_μ(f)(r_1 e^{2πix_1}, r_2 e^{2πix_2}) - f‖ in L²(μ) on a radius table.

    Rows run r_2 outer and r_1 inner, matching the iterated limit with r_1
    first. The neglected coefficients contribute at most
    ‖f‖ Σ_j r_j^{N_j+1}/(1-r_j) ∏_{i≠j} 1/(1-r_i).

    Raises:
        RadiusTooCloseError: that bound exceeds tol at the largest radius.
    """
    if m.dim != 2:
        raise ValidationError("the boundary test is defined for two-dimensional measures")
    radii = sorted(float(r) for r in radii)
    if not radii or radii[0] <= 0 or radii[-1] >= 1:
        raise ValidationError("radii must lie strictly inside (0, 1)")

    series = nct_d(m, f, orders, q, tol=moment_tol, workers=workers)
    r = radii[-1]
    norm = l2_norm(m, f, moment_tol)
    tail = 0.0
    for j, n in enumerate(series.orders):
        if _coordinate_exact(m, j, n):
            continue
        tail += r ** (n + 1) / (1 - r) / (1 - r) ** (series.dim - 1)
    tail *= norm
    if tail > tol:
        raise RadiusTooCloseError(
            f"truncation tail {tail:.3g} at radius {r} exceeds {tol}; raise the orders"
        )

    rows = []
    for r2 in radii:
        for r1 in radii:
            residual = series.on_torus((r1, r2)) - f
            value, _ = trig_inner(m, residual, residual, moment_tol)
            rows.append((r1, r2, float(np.sqrt(max(value.real, 0.0)))))
    iterated = [(r2, e) for r1, r2, e in rows if r1 == radii[-1]]
    return BoundaryReport(rows, iterated, tail)
