"""
Named invariant suites behind `slicefourier verify`.

Each suite runs a fixed set of checks against one measure and reports
{suite, passed, checks: [{name, passed, value, tolerance}]}, plus a
reports mapping when a check comes from a larger diagnostic. Checks that
do not apply to the measure (for example inner functions of a 2-d
measure) are skipped rather than failed.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .classify import classify, slice_singularity_gate
from .errors import ConfigError, PrecisionWarning
from .expansion import analyze, analyze_staged, reconstruction_error
from .kaczmarz import (
    aux_coefficients,
    aux_matrix,
    kaczmarz_iterates,
    operator_kaczmarz_report,
    parseval_defect,
)
from .measures import (
    DigitIFS,
    Measure,
    ProductMeasure,
    empirical_moment,
    is_swap_symmetric,
    marginal,
    moment_gram,
    moment_table,
    moments,
)
from .quadrature import QuadratureSpec, SliceChain
from .transforms import (
    backward_shift_residual,
    inner_function,
    model_space_residual,
    nct_1d,
    nct_equality_test,
    symmetry_reflection_test,
)
from .trigpoly import TrigPoly

SUITES = ("measure", "kaczmarz", "expansion", "transforms", "classify")


@dataclass
class Check:
    name: str
    passed: bool
    value: float
    tolerance: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "value": float(self.value),
            "tolerance": float(self.tolerance),
        }


@dataclass
class SuiteResult:
    suite: str
    checks: list[Check] = field(default_factory=list)
    reports: dict[str, Any] = field(default_factory=dict)  # diagnostics behind the checks

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def below(self, name: str, value: float, tolerance: float) -> None:
        """Record a check that passes when value ≤ tolerance."""
        self.checks.append(Check(name, bool(value <= tolerance), value, tolerance))

    def to_dict(self) -> dict[str, Any]:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            **({"reports": self.reports} if self.reports else {}),
        }


def _coordinates(m: Measure) -> list[Measure]:
    return [m] if m.dim == 1 else [marginal(m, [j]) for j in range(m.dim)]


def random_trigpolys(dim: int, count: int, seed: int = 0, span: int = 3, terms: int = 4) -> list[TrigPoly]:
    """Seeded random polynomials with frequencies in [-span, span]^dim."""
    rng = np.random.default_rng(seed)
    polys = []
    for _ in range(count):
        freqs = rng.integers(-span, span + 1, size=(terms, dim))
        coeffs = rng.normal(size=terms) + 1j * rng.normal(size=terms)
        polys.append(TrigPoly(dim, freqs, coeffs))
    return polys


def _is_product(m: Measure) -> bool:
    if isinstance(m, ProductMeasure) or m.dim == 1:
        return True
    if isinstance(m, DigitIFS):
        return SliceChain(m).is_product()
    xs = [np.unique(m.points[:, j]) for j in range(m.dim)]
    if len(m.points) != int(np.prod([len(x) for x in xs])):
        return False
    margins = [marginal(m, [j]).weights for j in range(m.dim)]
    expected = margins[0]
    for w in margins[1:]:
        expected = np.multiply.outer(expected, w).reshape(-1)
    return bool(np.allclose(np.sort(m.weights), np.sort(expected), rtol=0, atol=1e-12))


def measure_suite(m: Measure, seed: int = 0) -> SuiteResult:
    result = SuiteResult("measure")
    zero, _ = moments(m, np.zeros((1, m.dim)))
    result.below("moment_at_zero", float(abs(zero[0] - 1)), 1e-12)

    axis = np.arange(-4, 5)
    grid = np.stack(np.meshgrid(*[axis] * m.dim, indexing="ij"), axis=-1).reshape(-1, m.dim)
    plus, _ = moments(m, grid)
    minus, _ = moments(m, -grid)
    result.below("conjugate_symmetry", float(np.abs(minus - np.conj(plus)).max()), 1e-12)

    worst = 0.0
    for coordinate in _coordinates(m):
        eig = np.linalg.eigvalsh(moment_gram(coordinate, 16))
        worst = max(worst, -float(eig.min()))
    result.below("gram_positive", worst, 1e-10)

    count = 20000
    xi = np.eye(m.dim)[:1]
    estimate = empirical_moment(m, xi, count, seed=seed)
    exact, _ = moments(m, xi)
    result.below("empirical_moment", float(abs(estimate[0] - exact[0])), 5 / np.sqrt(count))
    return result


def kaczmarz_suite(m: Measure, seed: int = 0) -> SuiteResult:
    result = SuiteResult("kaczmarz")
    f = TrigPoly.exponential(1)
    for j, coordinate in enumerate(_coordinates(m)):
        table = moment_table(coordinate, nmax=66)
        aux = aux_matrix(table, 64)
        result.below(f"toeplitz_consistency[{j}]", aux.consistency_residual(), 1e-10)

        defect = parseval_defect(table, f, 32)
        steps = np.diff(defect.partial_sums)
        result.below(f"partial_sums_nondecreasing[{j}]", float(max(0.0, -steps.min())), 1e-12)
        result.below(f"bessel[{j}]", float(defect.partial_sums[-1] - defect.norm_squared * (1 + 1e-8)), 0.0)

        iterates = kaczmarz_iterates(table, f, 32)
        coeffs = aux_coefficients(table, f, 32)
        result.below(f"row_action_iterates[{j}]", float(np.abs(iterates[-1] - coeffs).max()), 1e-10)

    if m.dim >= 2:
        report = operator_kaczmarz_report(m, 16, prefixes=8, seed=seed)
        result.below("operator_identity", report.residual, 1e-10)
        result.reports["operator"] = report.to_dict()
    return result


def _default_quadrature(m: Measure, q: QuadratureSpec | None) -> QuadratureSpec:
    if q is not None:
        return q
    return QuadratureSpec(depth=8 if m.dim >= 3 else 12)


def expansion_suite(
    m: Measure, q: QuadratureSpec | None = None, seed: int = 0, workers: int = 1
) -> SuiteResult:
    result = SuiteResult("expansion")
    gate = slice_singularity_gate(m)
    result.checks.append(Check("slice_singular", gate, float(gate), 1.0))
    if not gate:
        return result

    q = _default_quadrature(m, q)
    orders = (4,) * m.dim if m.dim >= 3 else (8,) * m.dim
    tol = 1e-6 if m.dim >= 3 else 1e-8

    one = analyze(m, TrigPoly.constant(m.dim), orders, q, workers=workers)
    expected = np.zeros_like(one.values)
    expected[(0,) * m.dim] = 1.0
    slack = one.quadrature.get("error_estimate", 0.0)
    result.below("constant_function", float(np.abs(one.values - expected).max()), 1e-9 + slack)

    f, g = random_trigpolys(m.dim, 2, seed=seed, span=2, terms=3)
    cf = analyze(m, f, orders, q, workers=workers)
    cg = analyze(m, g, orders, q, workers=workers)
    combined = analyze(m, f * 2.0 + g * (0.5 - 1j), orders, q, workers=workers)
    linear = np.abs(combined.values - (2.0 * cf.values + (0.5 - 1j) * cg.values)).max()
    result.below("linearity", float(linear), 1e-10)

    for name, c in (("bessel_f", cf), ("bessel_g", cg)):
        excess = c.energy() - c.norm_squared * (1 + 1e-8)
        result.below(name, float(excess), c.quadrature.get("error_estimate", 0.0))

    staged = analyze_staged(m, f, orders, q, workers=workers)
    result.below("staged_agreement", float(np.abs(staged.values - cf.values).max()), tol)

    threaded = analyze(m, f, orders, q, workers=1 if workers > 1 else 4)
    result.below("worker_determinism", float(np.abs(threaded.values - cf.values).max()), 0.0)

    report = reconstruction_error(m, TrigPoly.exponential((1,) * m.dim), orders, q, workers=workers)
    first_leg = [e for o, e in report.rows if all(v == 0 for v in o[1:])]
    rise = max([0.0] + [b - a for a, b in zip(first_leg, first_leg[1:])])
    slack = report.coefficients.quadrature.get("error_estimate", 0.0)
    result.below("sweep_first_leg_nonincreasing", rise, 1e-9 + slack)
    return result


def transforms_suite(
    m: Measure, q: QuadratureSpec | None = None, seed: int = 0, workers: int = 1
) -> SuiteResult:
    result = SuiteResult("transforms")
    if m.dim == 1:
        n = 32
        b = inner_function(m, n + 1)
        result.below("inner_function_at_zero", float(abs(b.coefficients[0])), 1e-10)
        radii = np.linspace(0.0, 0.95, 8)
        angles = np.exp(2j * np.pi * np.arange(8) / 8)
        grid = [r * a for r in radii for a in angles]
        excess = max(abs(b.evaluate(w)) - abs(w) for w in grid)
        result.below("de_branges_bound", float(excess), 1e-6)
        inner = [0.5 * a for a in angles]
        result.below("herglotz_consistency", b.herglotz_residual(inner), 1e-8)
        shifted = nct_1d(m, TrigPoly.exponential(-1), n).coefficients
        result.below("inner_function_shift", float(np.abs(shifted - b.coefficients[1:]).max()), 1e-9)
        worst = max(backward_shift_residual(m, p, 16) for p in random_trigpolys(1, 5, seed=seed))
        result.below("backward_shift", worst, 1e-9)
        result.reports["inner_function"] = b.to_dict()
        return result

    if not slice_singularity_gate(m):
        result.checks.append(Check("slice_singular", False, 0.0, 1.0))
        return result
    q = _default_quadrature(m, q)
    orders = (4,) * m.dim if m.dim >= 3 else (8,) * m.dim
    f = random_trigpolys(m.dim, 1, seed=seed, span=2, terms=3)[0]
    direct = analyze(m, f, orders, q, workers=workers)
    staged = analyze_staged(m, f, orders, q, workers=workers)
    tol = 1e-6 if m.dim >= 3 else 1e-8
    result.below("composition", float(np.abs(direct.values - staged.values).max()), tol)

    if m.dim == 2:
        report = model_space_residual(m, f, orders=8, prefixes=4, seed=seed)
        result.below("model_space", report.residual, 1e-4 + report.tail_bound)
        result.reports["model_space"] = report.to_dict()

        basis = [TrigPoly.exponential(v) for v in ((0, 0), (1, 0), (0, 1), (1, 1))]
        equality = nct_equality_test(m, basis, orders, q, workers=workers)
        product = _is_product(m)
        result.checks.append(
            Check("equality_dichotomy", equality.equal == product, equality.deviation, equality.tolerance)
        )
        result.reports["equality"] = equality.to_dict()
        if is_swap_symmetric(m):
            deviation = symmetry_reflection_test(m, basis, orders, q, workers=workers)
            result.below("symmetry_reflection", deviation, 1e-4)
    return result


def classify_suite(m: Measure) -> SuiteResult:
    result = SuiteResult("classify")
    gate = slice_singularity_gate(m)
    if not isinstance(m, DigitIFS):
        result.checks.append(Check("gate_defined", True, float(gate), 1.0))
        return result
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PrecisionWarning)
        report = classify(m)
        mismatches = 0
        if m.dim > 1:
            for record in report.coordinates:
                sub = classify(marginal(m, [record.coordinate])).coordinates[0]
                mismatches += sub.verdict != record.verdict
    result.below("marginal_consistency", float(mismatches), 0.0)
    result.checks.append(Check("gate_matches_report", gate == report.overall, float(gate), 1.0))
    return result


def run_suite(
    m: Measure,
    suite: str = "all",
    q: QuadratureSpec | None = None,
    seed: int = 0,
    progress_callback: Callable[[int, int, str], None] | None = None,
    workers: int = 1,
) -> list[SuiteResult]:
    """
    Run one named suite, or every suite for 'all'.

    Results do not depend on `workers`; it only sets the thread count of
    the expansion and transform suites.
    """
    names = SUITES if suite == "all" else (suite,)
    if any(name not in SUITES for name in names):
        raise ConfigError(f"unknown suite {suite!r}; expected one of {', '.join(SUITES + ('all',))}")

    runners: dict[str, Callable[[], SuiteResult]] = {
        "measure": lambda: measure_suite(m, seed),
        "kaczmarz": lambda: kaczmarz_suite(m, seed),
        "expansion": lambda: expansion_suite(m, q, seed, workers),
        "transforms": lambda: transforms_suite(m, q, seed, workers),
        "classify": lambda: classify_suite(m),
    }
    results = []
    for i, name in enumerate(names, 1):
        if progress_callback:
            progress_callback(i, len(names), f"Running {name} suite")
        results.append(runners[name]())
    return results
