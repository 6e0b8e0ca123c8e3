"""
Fourier expansions along iterated slices.

For a slice-singular μ on [0,1)^d the coefficient of f at (n_1..n_d) is

    c_{n_1..n_d} = ∫ f(x) conj(g^{(1)}_{n_1}(x_1)) ··· conj(g^{(d)}_{n_d}(x_d)) dμ(x),

where g^{(j)} is the auxiliary sequence of the slice of the marginal on
(x_1..x_j) above (x_1..x_{j-1}); g^{(1)} belongs to the x_1 marginal. The
expansion f = Σ c_n e^{2πi n·x} converges in L²(μ) when the partial sums
are taken innermost index first.
"""

from __future__ import annotations

import concurrent.futures as cf
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .classify import slice_singularity_gate
from .errors import UnsupportedMeasureError, ValidationError
from .kaczmarz import aux_coefficients, slice_aux, table_for
from .measures import (
    DEFAULT_TOL,
    AtomicMeasure,
    DigitIFS,
    Measure,
    ProductMeasure,
    chaos_digits,
    chaos_sample,
    digits_to_points,
    marginal,
    slice_law,
    trig_inner,
)
from .quadrature import (
    DEFAULT_ORDER,
    EXACT,
    EXTRA_SAMPLE_DEPTH,
    MONTE_CARLO,
    PREFIX_EXACT,
    PrefixPlan,
    QuadratureSpec,
    prefix_plan,
)
from .trigpoly import TrigPoly

# Monte Carlo samples per chunk
MC_CHUNK = 4096


def _box(orders: Sequence[int]) -> np.ndarray:
    """All index vectors 0 ≤ n ≤ orders, C order, shape (B, d)."""
    axes = [np.arange(n + 1) for n in orders]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(orders))


@dataclass(frozen=True, eq=False)
class CoeffTensor:
    """Coefficients c_{n_1..n_d} for 0 ≤ n_k ≤ N_k."""

    orders: tuple[int, ...]
    values: np.ndarray
    quadrature: dict[str, Any] = field(default_factory=dict)
    norm_squared: float | None = None  # ‖f‖² in L²(μ)

    @property
    def dim(self) -> int:
        return len(self.orders)

    def energy(self) -> float:
        """Σ |c|²."""
        return float(np.sum(np.abs(self.values) ** 2))

    def bessel_defect(self) -> float | None:
        """‖f‖² - Σ|c|²; non-negative up to quadrature error."""
        if self.norm_squared is None:
            return None
        return self.norm_squared - self.energy()

    def truncate(self, orders: Sequence[int]) -> CoeffTensor:
        orders = tuple(int(n) for n in orders)
        if len(orders) != self.dim or any(n < 0 or n > m for n, m in zip(orders, self.orders)):
            raise ValidationError(f"orders {orders} do not fit inside {self.orders}")
        index = tuple(slice(0, n + 1) for n in orders)
        return CoeffTensor(orders, self.values[index], self.quadrature, self.norm_squared)

    def transpose(self, axes: Iterable[int] | None = None) -> CoeffTensor:
        """Reorder index roles; reverses them by default."""
        axes = list(range(self.dim))[::-1] if axes is None else list(axes)
        orders = tuple(self.orders[a] for a in axes)
        return CoeffTensor(orders, np.transpose(self.values, axes), self.quadrature, self.norm_squared)

    def partial_sum(self) -> TrigPoly:
        """Σ c_n e^{2πi n·x} over the whole rectangle."""
        return TrigPoly(self.dim, _box(self.orders), self.values.reshape(-1))

    def to_dict(self) -> dict[str, Any]:
        return {
            "orders": list(self.orders),
            "quadrature": dict(self.quadrature),
            "norm_squared": self.norm_squared,
            "energy": self.energy(),
            "bessel_defect": self.bessel_defect(),
        }


def _check_inputs(m: Measure, f: TrigPoly, orders: Sequence[int] | None) -> tuple[int, ...]:
    if f.dim != m.dim:
        raise ValidationError(f"f has dimension {f.dim}, the measure {m.dim}")
    if orders is None:
        return (DEFAULT_ORDER,) * m.dim
    orders = tuple(int(n) for n in orders)
    if len(orders) != m.dim:
        raise ValidationError(f"expected {m.dim} orders, got {len(orders)}")
    if any(n < 0 for n in orders):
        raise ValidationError(f"orders must be non-negative, got {orders}")
    return orders


def _map(job: Callable[[Any], np.ndarray], items: list, workers: int) -> list[np.ndarray]:
    """Run jobs, keeping input order so reductions do not depend on workers."""
    if workers > 1 and len(items) > 1:
        with cf.ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(job, items))
    return [job(item) for item in items]


def _reduce(partials: list[np.ndarray], shape: tuple[int, ...]) -> np.ndarray:
    total = np.zeros(shape, dtype=np.complex128)
    for part in partials:
        total += part
    return total


# Prefix-exact kernels


def _direct_chunk(plan, groups: np.ndarray, f: TrigPoly, orders: tuple[int, ...]) -> np.ndarray:
    """Joint group masses of f·e_{-k}, then every stage's conjugated aux matrix."""
    d = len(orders)
    box = _box(orders)
    eta = f.frequencies[:, None, :] - box[None, :, :]
    phi = plan.joint_factor(groups, eta.reshape(-1, d))
    psi = np.einsum("f,gfb->gb", f.coefficients, phi.reshape(len(groups), len(f), len(box)))
    tensor = psi.reshape((len(groups),) + tuple(n + 1 for n in orders))
    for stage in range(d):
        a = np.conj(plan.aux(stage, groups))
        tensor = np.moveaxis(tensor, stage + 1, -1)
        tensor = np.einsum("gnk,g...k->g...n", a, tensor)
        tensor = np.moveaxis(tensor, -1, stage + 1)
    return tensor.sum(axis=0)


def _staged_chunk(plan, groups: np.ndarray, f: TrigPoly, orders: tuple[int, ...]) -> np.ndarray:
    """Slice transforms applied one coordinate at a time, innermost first."""
    result = np.broadcast_to(f.coefficients, (len(groups), len(f))).astype(np.complex128)
    for stage in reversed(range(len(orders))):
        n = orders[stage]
        nu = f.frequencies[:, stage]
        low = int(nu.min()) - n
        eta = np.arange(low, int(nu.max()) + 1)
        psi = plan.stage_factor(stage, groups, eta)  # (G, E)
        index = nu[None, :] - np.arange(n + 1)[:, None] - low  # (k, F)
        h = np.einsum("gnk,gkf->gnf", np.conj(plan.aux(stage, groups)), psi[:, index])
        result = np.einsum("gnf,gf...->gfn...", h, result)
    return result.sum(axis=(0, 1))


def _prefix_exact(m, f, orders, q, tol, workers, kernel) -> tuple[np.ndarray, dict[str, Any]]:
    plan = prefix_plan(m, orders, q.depth, tol)
    chunks = list(plan.chunks())
    partials = _map(lambda bounds: kernel(plan, plan.groups(*bounds), f, orders), chunks, workers)
    values = _reduce(partials, tuple(n + 1 for n in orders))

    if isinstance(plan, PrefixPlan):
        max_l1 = int(np.abs(f.frequencies).sum(axis=1).max()) + sum(orders)
        meta = {
            "mode": PREFIX_EXACT,
            "depth": q.depth,
            "groups": plan.group_count(),
            "seed": q.seed,
            "error_estimate": plan.error_estimate(f.norm1(), max_l1),
        }
    else:
        meta = {"mode": EXACT, "seed": q.seed, "error_estimate": 0.0}
    return values, meta


# Atomic measures


class _AtomicSlices:
    """Cached slice auxiliary matrices of an atomic measure."""

    def __init__(self, m: AtomicMeasure, orders: tuple[int, ...], tol: float):
        self.measure = m
        self.orders = orders
        self.tol = tol
        self._stages = [
            m if j == m.dim else marginal(m, range(j)) for j in range(1, m.dim + 1)
        ]
        self._cache: dict[tuple, np.ndarray] = {}

    def aux(self, stage: int, point: np.ndarray) -> np.ndarray:
        head = tuple(float(v) for v in point[:stage])
        key = (stage, head)
        if key not in self._cache:
            stage_measure = self._stages[stage]
            local = stage_measure if stage == 0 else slice_law(stage_measure, head)
            self._cache[key] = slice_aux(local, self.orders[stage], self.tol).matrix
        return self._cache[key]

    def g(self, stage: int, points: np.ndarray) -> np.ndarray:
        """(P, N+1) values g_n(x_stage) of each point's slice sequence."""
        n = self.orders[stage]
        phases = np.exp(2j * np.pi * np.outer(points[:, stage], np.arange(n + 1)))
        return np.stack(
            [self.aux(stage, p) @ phase for p, phase in zip(points, phases)]
        )


def _atomic_direct(m: AtomicMeasure, f: TrigPoly, orders, tol) -> np.ndarray:
    slices = _AtomicSlices(m, orders, tol)
    tensor = m.weights * f.evaluate(m.points)
    for stage in range(m.dim):
        tensor = np.einsum("p...,pn->p...n", tensor, np.conj(slices.g(stage, m.points)))
    return tensor.sum(axis=0)


def _atomic_staged(m: AtomicMeasure, f: TrigPoly, orders, tol) -> np.ndarray:
    """Sum atoms slice by slice, collapsing one coordinate per stage."""
    slices = _AtomicSlices(m, orders, tol)
    points = m.points
    tensor = m.weights * f.evaluate(points)
    for stage in reversed(range(m.dim)):
        tensor = np.einsum("pn,p...->pn...", np.conj(slices.g(stage, points)), tensor)
        if stage == 0:
            return tensor.sum(axis=0)
        heads, inverse = np.unique(points[:, :stage], axis=0, return_inverse=True)
        grouped = np.zeros((len(heads),) + tensor.shape[1:], dtype=np.complex128)
        np.add.at(grouped, inverse.reshape(-1), tensor)
        tensor = grouped
        # Representative rows keep the head coordinates; deeper columns are unused
        points = np.hstack([heads, np.zeros((len(heads), m.dim - stage))])
    raise AssertionError("unreachable")


# Monte Carlo


def _monte_carlo(m, f, orders, q, tol, workers) -> tuple[np.ndarray, dict[str, Any]]:
    if isinstance(m, DigitIFS):
        plan = PrefixPlan(m, orders, q.depth, tol, exhaustive=False)
    elif isinstance(m, ProductMeasure):
        plan = prefix_plan(m, orders, q.depth, tol)
    else:
        raise UnsupportedMeasureError(f"no Monte Carlo quadrature for {m!r}")
    depth = q.depth + EXTRA_SAMPLE_DEPTH

    def job(start: int) -> np.ndarray:
        count = min(MC_CHUNK, q.samples - start)
        if isinstance(m, DigitIFS):
            indices = chaos_digits(m, count, depth, q.seed, start=start)
            x = digits_to_points(m, indices)
            groups = plan.chain.digit_joint[indices[:, : q.depth]]
        else:
            x = chaos_sample(m, count, depth, q.seed, start=start)
            groups = plan.groups(0, count)
        tensor = f.evaluate(x)
        for stage, n in enumerate(orders):
            phases = np.exp(2j * np.pi * np.outer(x[:, stage], np.arange(n + 1)))
            g = np.einsum("snk,sk->sn", plan.aux(stage, groups), phases)
            tensor = np.einsum("s...,sn->s...n", tensor, np.conj(g))
        return np.stack([tensor.sum(axis=0), (np.abs(tensor) ** 2).sum(axis=0)])

    partials = _map(job, list(range(0, q.samples, MC_CHUNK)), workers)
    sums = _reduce(partials, (2,) + tuple(n + 1 for n in orders))
    mean = sums[0] / q.samples
    variance = np.maximum(sums[1].real / q.samples - np.abs(mean) ** 2, 0.0)
    stderr = np.sqrt(variance / q.samples)
    meta = {
        "mode": MONTE_CARLO,
        "samples": q.samples,
        "depth": q.depth,
        "seed": q.seed,
        "error_estimate": float(stderr.max()),
    }
    return mean, meta


def _analyze(m, f, orders, q, tol, workers, staged, require_slice_singular) -> CoeffTensor:
    orders = _check_inputs(m, f, orders)
    q = q or QuadratureSpec()
    if require_slice_singular and not slice_singularity_gate(m):
        raise UnsupportedMeasureError(f"{m!r} is not slice singular in every variable order")

    shape = tuple(n + 1 for n in orders)
    norm_sq = trig_inner(m, f, f, tol)[0].real if not f.is_zero() else 0.0
    if f.is_zero():
        meta = {"mode": EXACT, "seed": q.seed, "error_estimate": 0.0}
        return CoeffTensor(orders, np.zeros(shape, dtype=np.complex128), meta, 0.0)

    if m.dim == 1:
        n = orders[0]
        values = aux_coefficients(table_for(m, f, n, tol), f, n)
        meta = {"mode": EXACT, "seed": q.seed, "error_estimate": 0.0}
    elif isinstance(m, AtomicMeasure):
        kernel = _atomic_staged if staged else _atomic_direct
        values = kernel(m, f, orders, tol)
        meta = {"mode": EXACT, "seed": q.seed, "error_estimate": 0.0}
    elif q.mode == MONTE_CARLO:
        values, meta = _monte_carlo(m, f, orders, q, tol, workers)
    else:
        kernel = _staged_chunk if staged else _direct_chunk
        values, meta = _prefix_exact(m, f, orders, q, tol, workers, kernel)
    return CoeffTensor(orders, values.reshape(shape), meta, float(norm_sq))


def analyze(
    m: Measure,
    f: TrigPoly,
    orders: Sequence[int] | None = None,
    q: QuadratureSpec | None = None,
    *,
    tol: float = DEFAULT_TOL,
    workers: int = 1,
    require_slice_singular: bool = True,
) -> CoeffTensor:
    """
    Coefficients c_{n_1..n_d} of f, from the joint law of each group.

    Args:
        m: Slice-singular measure (DigitIFS, atomic or product).
        f: Trig polynomial of the same dimension.
        orders: Truncation orders (N_1..N_d), default 16 each.
        q: Quadrature spec, default prefix-exact at depth 12.
        tol: Moment tolerance.
        workers: Threads over class-sequence chunks; results do not
            depend on this.
        require_slice_singular: Refuse measures failing the classifier.

    Raises:
        UnsupportedMeasureError: m fails the slice-singularity gate.
        QuadratureBudgetError: too many class-sequence groups.
    """
    return _analyze(m, f, orders, q, tol, workers, False, require_slice_singular)


def analyze_staged(
    m: Measure,
    f: TrigPoly,
    orders: Sequence[int] | None = None,
    q: QuadratureSpec | None = None,
    *,
    tol: float = DEFAULT_TOL,
    workers: int = 1,
    require_slice_singular: bool = True,
) -> CoeffTensor:
    """
    Same coefficients computed stage by stage: the innermost slice
    transform of f first, then each outer coordinate's transform.
    Monte Carlo runs share one engine with analyze.
    """
    return _analyze(m, f, orders, q, tol, workers, True, require_slice_singular)


def synthesize(c: CoeffTensor, points: np.ndarray) -> np.ndarray:
    """Evaluate the rectangular partial sum at (P, d) points."""
    return c.partial_sum().evaluate(points)


def sweep_orders(orders: Sequence[int]) -> list[tuple[int, ...]]:
    """Nested rectangles from the origin, raising N_1 first, then N_2, ..."""
    current = [0] * len(orders)
    rows = [tuple(current)]
    for j, n in enumerate(orders):
        for value in range(1, n + 1):
            current[j] = value
            rows.append(tuple(current))
    return rows


@dataclass(frozen=True, eq=False)
class ReconstructionReport:
    error: float
    rows: list[tuple[tuple[int, ...], float]]
    coefficients: CoeffTensor

    def to_dict(self) -> dict[str, Any]:
        return {
            "error": self.error,
            "rows": [{"orders": list(o), "error": e} for o, e in self.rows],
            "coefficients": self.coefficients.to_dict(),
        }


def reconstruction_error(
    m: Measure,
    f: TrigPoly,
    orders: Sequence[int] | None = None,
    q: QuadratureSpec | None = None,
    *,
    tol: float = DEFAULT_TOL,
    workers: int = 1,
) -> ReconstructionReport:
    """‖f - S_N f‖ in L²(μ) along the sweep of nested partial sums."""
    c = analyze(m, f, orders, q, tol=tol, workers=workers)
    rows = []
    for row in sweep_orders(c.orders):
        residual = f - c.truncate(row).partial_sum()
        value, _ = trig_inner(m, residual, residual, tol)
        rows.append((row, float(np.sqrt(max(value.real, 0.0)))))
    return ReconstructionReport(rows[-1][1], rows, c)
