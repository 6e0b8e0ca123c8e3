"""
Quadrature plans for the nested slice integrals.

A coefficient c_{n_1..n_d} is the μ-integral of f against the conjugated
slice auxiliary functions of every disintegration stage. For a DigitIFS
these functions depend on a point only through the sequence of slice
classes of its digits, so prefix-exact quadrature enumerates class
sequences rather than raw digit prefixes:

- stage j (j ≥ 2) slices coordinate j given the first j-1 coordinates;
  two head digits share a class when their conditional laws agree and
  they split the next stage's classes the same way;
- the joint class of a digit vector lists its class at every stage;
- a group is a length-K sequence of joint classes; within a group every
  slice auxiliary matrix is fixed and the group's Fourier mass factors
  level by level.

Levels beyond K are integrated with each coordinate's own marginal law,
which is exact for product-like digit systems. Products of factors use a
single group with closed-form factor moments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Iterator

import numpy as np

from .errors import ConfigError, QuadratureBudgetError, UnsupportedMeasureError
from .kaczmarz import forward_substitute
from .measures import (
    DEFAULT_TOL,
    DigitIFS,
    ProductMeasure,
    conditional_laws,
    marginal,
    moments,
)

PREFIX_EXACT = "prefix-exact"
MONTE_CARLO = "monte-carlo"
EXACT = "exact"

# Defaults for prefix depth and truncation orders
DEFAULT_DEPTH = 12
DEFAULT_ORDER = 16

# Largest number of class-sequence groups enumerated
MAX_GROUPS = 2**21

# Groups evaluated per chunk
CHUNK_GROUPS = 2048

# Digits drawn below the class depth for Monte Carlo points
EXTRA_SAMPLE_DEPTH = 20

LAW_DECIMALS = 12


@dataclass(frozen=True)
class QuadratureSpec:
    """How nested slice integrals over the marginal are evaluated."""

    mode: str = PREFIX_EXACT  # "prefix-exact" or "monte-carlo"
    depth: int = DEFAULT_DEPTH  # digit depth K of class sequences
    samples: int = 0  # Monte Carlo sample count
    seed: int = 0

    def __post_init__(self) -> None:
        if self.mode not in (PREFIX_EXACT, MONTE_CARLO):
            raise ConfigError(f"unknown quadrature mode {self.mode!r}")
        if self.depth < 1:
            raise ConfigError(f"quadrature depth must be positive, got {self.depth}")
        if self.mode == MONTE_CARLO and self.samples < 1:
            raise ConfigError("Monte Carlo quadrature needs a positive sample count")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")

    @classmethod
    def parse(cls, text: str, seed: int = 0, depth: int = DEFAULT_DEPTH) -> QuadratureSpec:
        """Parse 'prefix:K' or 'mc:COUNT'."""
        kind, _, value = text.partition(":")
        try:
            number = int(value)
        except ValueError:
            raise ConfigError(f"bad quadrature spec {text!r}; use prefix:K or mc:COUNT") from None
        if kind == "prefix":
            return cls(PREFIX_EXACT, depth=number, seed=seed)
        if kind == "mc":
            return cls(MONTE_CARLO, depth=depth, samples=number, seed=seed)
        raise ConfigError(f"bad quadrature spec {text!r}; use prefix:K or mc:COUNT")

    def describe(self) -> str:
        if self.mode == MONTE_CARLO:
            return f"mc:{self.samples}"
        return f"prefix:{self.depth}"


def _law_key(law: np.ndarray) -> tuple[float, ...]:
    return tuple(np.round(law, LAW_DECIMALS) + 0.0)


class SliceChain:
    """
    Stage classes of a DigitIFS of dimension d ≥ 2.

    Attributes:
        joint: (C, d-1) stage class ids (stages 2..d) of each joint class.
        digit_joint: (D,) joint class of every digit vector.
        stage_laws: stage_laws[j] is the (C_j, base) array of conditional
            laws for stage j = 2..d (index j-2).
        stage_tables: (d, C, base) weights over digit values for the
            level-wise factor of each stage within a joint class.
        joint_tables: (C, D) digit weights restricted to each joint class.
    """

    def __init__(self, m: DigitIFS):
        if m.dim < 2:
            raise ValueError("a slice chain needs dimension at least 2")
        self.measure = m
        self.base = m.base
        self.dim = m.dim

        class_of: list[dict[tuple[int, ...], int]] = [dict() for _ in range(m.dim + 1)]
        representative: list[dict[int, tuple[int, ...]]] = [dict() for _ in range(m.dim + 1)]
        law_of: list[dict[tuple[int, ...], np.ndarray]] = [dict() for _ in range(m.dim + 1)]
        self.stage_laws: list[np.ndarray] = [None] * (m.dim - 1)

        # Innermost stage first so each stage can refine by the next one
        for j in range(m.dim, 1, -1):
            stage_measure = m if j == m.dim else marginal(m, range(j))
            heads, _, laws = conditional_laws(stage_measure)
            keys: dict[Any, int] = {}
            class_laws = []
            for head, law in zip(heads, laws):
                head = tuple(int(v) for v in head)
                if j == m.dim:
                    key = _law_key(law)
                else:
                    split = tuple(
                        class_of[j + 1][head + (t,)] if law[t] > 0 else -1
                        for t in range(m.base)
                    )
                    key = (_law_key(law), split)
                if key not in keys:
                    keys[key] = len(keys)
                    class_laws.append(law)
                    representative[j][keys[key]] = head
                class_of[j][head] = keys[key]
                law_of[j][head] = law
            self.stage_laws[j - 2] = np.array(class_laws)

        digit_classes = np.array(
            [
                [class_of[j][tuple(int(v) for v in digit[: j - 1])] for j in range(2, m.dim + 1)]
                for digit in m.digits
            ],
            dtype=np.int64,
        )
        self.joint, digit_joint = np.unique(digit_classes, axis=0, return_inverse=True)
        self.digit_joint = digit_joint.reshape(-1)
        count = len(self.joint)

        self.joint_tables = np.zeros((count, len(m.digits)))
        self.joint_tables[self.digit_joint, np.arange(len(m.digits))] = m.weights

        # Level-wise factor of each stage inside a joint class
        first = marginal(m, [0])
        self.stage_tables = np.zeros((m.dim, count, m.base))
        for c, classes in enumerate(self.joint):
            for s, w in zip(first.digits[:, 0], first.weights):
                if class_of[2][(int(s),)] == classes[0]:
                    self.stage_tables[0, c, s] = w
            for j in range(2, m.dim + 1):
                head = representative[j][int(classes[j - 2])]
                law = law_of[j][head]
                for t in range(m.base):
                    if law[t] == 0:
                        continue
                    if j < m.dim and class_of[j + 1][head + (t,)] != classes[j - 1]:
                        continue
                    self.stage_tables[j - 1, c, t] = law[t]

        self.coordinate_marginals = [marginal(m, [j]) for j in range(m.dim)]

    @property
    def joint_count(self) -> int:
        return len(self.joint)

    def is_product(self) -> bool:
        """Every stage has a single conditional law, so μ_K = μ."""
        return all(len(laws) == 1 for laws in self.stage_laws)

    def group_count(self, depth: int) -> int:
        return self.joint_count**depth


class _Plan:
    """Shared interface of the quadrature plans."""

    dim: int
    orders: tuple[int, ...]
    tol: float

    def group_count(self) -> int:
        raise NotImplementedError

    def groups(self, start: int, stop: int) -> Any:
        raise NotImplementedError

    def aux(self, stage: int, groups: Any) -> np.ndarray:
        """(G, N+1, N+1) auxiliary matrices of a stage (0-based) per group."""
        raise NotImplementedError

    def joint_factor(self, groups: Any, eta: np.ndarray) -> np.ndarray:
        """(G, E) group mass of e^{2πi η·x} from the joint digit law."""
        raise NotImplementedError

    def stage_factor(self, stage: int, groups: Any, eta: np.ndarray) -> np.ndarray:
        """(G, E) level-wise stage factor of e^{2πi η x_stage}."""
        raise NotImplementedError

    def error_estimate(self, f_norm1: float, max_l1: int) -> float:
        raise NotImplementedError

    def chunks(self) -> Iterator[tuple[int, int]]:
        total = self.group_count()
        for start in range(0, total, CHUNK_GROUPS):
            yield start, min(total, start + CHUNK_GROUPS)


class PrefixPlan(_Plan):
    """Class-sequence enumeration for a DigitIFS of dimension at least 2."""

    def __init__(
        self,
        m: DigitIFS,
        orders: tuple[int, ...],
        depth: int,
        tol: float = DEFAULT_TOL,
        exhaustive: bool = True,
    ):
        self.measure = m
        self.dim = m.dim
        self.orders = tuple(orders)
        self.depth = depth
        self.tol = tol
        self.chain = SliceChain(m)

        first = self.chain.coordinate_marginals[0]
        n = self.orders[0]
        seq, _ = moments(first, np.arange(-n, n + 1)[:, None], tol)
        self._head_aux = forward_substitute(seq, n)

        total = self.chain.group_count(depth)
        if exhaustive and total > MAX_GROUPS:
            raise QuadratureBudgetError(
                f"{self.chain.joint_count} slice classes at depth {depth} give {total} "
                f"groups (limit {MAX_GROUPS}); lower the depth or use mc quadrature"
            )

    def group_count(self) -> int:
        return self.chain.group_count(self.depth)

    def groups(self, start: int, stop: int) -> np.ndarray:
        """(G, K) joint class sequences, level 1 most significant."""
        index = np.arange(start, stop, dtype=np.int64)
        count = self.chain.joint_count
        powers = count ** np.arange(self.depth - 1, -1, -1, dtype=np.int64)
        return (index[:, None] // powers[None, :]) % count

    def _level_phases(self, values: np.ndarray, eta: np.ndarray, level: int, sign: float) -> np.ndarray:
        """exp(sign·2πi η v / b^level) for digit values v, shape (V, E)."""
        scale = float(self.measure.base) ** level
        return np.exp(sign * 2j * np.pi * np.outer(values, eta) / scale)

    def aux(self, stage: int, groups: np.ndarray) -> np.ndarray:
        n = self.orders[stage]
        if stage == 0:
            return np.broadcast_to(self._head_aux, (len(groups), n + 1, n + 1))

        laws = self.chain.stage_laws[stage - 1]
        classes = self.chain.joint[groups][:, :, stage - 1]  # (G, K)
        freqs = np.arange(-n, n + 1, dtype=float)
        digits = np.arange(self.measure.base, dtype=float)
        seq = np.ones((len(groups), 2 * n + 1), dtype=np.complex128)
        for k in range(1, self.depth + 1):
            table = laws @ self._level_phases(digits, freqs, k, -1.0)  # (C_j, 2n+1)
            seq *= table[classes[:, k - 1]]
        tail = self.chain.coordinate_marginals[stage]
        scaled = freqs / float(self.measure.base) ** self.depth
        tail_values, _ = moments(tail, scaled[:, None], self.tol)
        return forward_substitute(seq * tail_values, n)

    def _tail(self, eta: np.ndarray) -> np.ndarray:
        """Coordinate-marginal mass of the levels beyond K."""
        scaled = -np.asarray(eta, dtype=float) / float(self.measure.base) ** self.depth
        out = np.ones(len(scaled), dtype=np.complex128)
        for j, tail in enumerate(self.chain.coordinate_marginals):
            values, _ = moments(tail, scaled[:, j : j + 1], self.tol)
            out *= values
        return out

    def joint_factor(self, groups: np.ndarray, eta: np.ndarray) -> np.ndarray:
        eta = np.asarray(eta, dtype=float).reshape(-1, self.dim)
        digits = self.measure.digits.astype(float)
        out = np.ones((len(groups), len(eta)), dtype=np.complex128)
        for k in range(1, self.depth + 1):
            phases = np.exp(2j * np.pi * (digits @ eta.T) / float(self.measure.base) ** k)
            table = self.chain.joint_tables @ phases  # (C, E)
            out *= table[groups[:, k - 1]]
        return out * self._tail(eta)[None, :]

    def stage_factor(self, stage: int, groups: np.ndarray, eta: np.ndarray) -> np.ndarray:
        eta = np.asarray(eta, dtype=float).reshape(-1)
        digits = np.arange(self.measure.base, dtype=float)
        weights = self.chain.stage_tables[stage]  # (C, base)
        out = np.ones((len(groups), len(eta)), dtype=np.complex128)
        for k in range(1, self.depth + 1):
            table = weights @ self._level_phases(digits, eta, k, 1.0)
            out *= table[groups[:, k - 1]]
        tail = self.chain.coordinate_marginals[stage]
        scaled = -eta / float(self.measure.base) ** self.depth
        tail_values, _ = moments(tail, scaled[:, None], self.tol)
        return out * tail_values[None, :]

    def error_estimate(self, f_norm1: float, max_l1: int) -> float:
        if self.chain.is_product():
            return 0.0
        return 4 * math.pi * max_l1 * float(self.measure.base) ** (-self.depth) * f_norm1


class ProductPlan(_Plan):
    """Closed-form integration for products of one-dimensional factors."""

    def __init__(self, m: ProductMeasure, orders: tuple[int, ...], tol: float = DEFAULT_TOL):
        self.measure = m
        self.dim = m.dim
        self.orders = tuple(orders)
        self.tol = tol
        self._aux = []
        for factor, n in zip(m.factors, self.orders):
            seq, _ = moments(factor, np.arange(-n, n + 1)[:, None], tol)
            self._aux.append(forward_substitute(seq, n))

    def group_count(self) -> int:
        return 1

    def groups(self, start: int, stop: int) -> np.ndarray:
        return np.zeros((stop - start, 0), dtype=np.int64)

    def aux(self, stage: int, groups: np.ndarray) -> np.ndarray:
        n = self.orders[stage]
        return np.broadcast_to(self._aux[stage], (len(groups), n + 1, n + 1))

    def joint_factor(self, groups: np.ndarray, eta: np.ndarray) -> np.ndarray:
        values, _ = moments(self.measure, -np.asarray(eta, dtype=float).reshape(-1, self.dim), self.tol)
        return np.broadcast_to(values, (len(groups), len(values)))

    def stage_factor(self, stage: int, groups: np.ndarray, eta: np.ndarray) -> np.ndarray:
        factor = self.measure.factors[stage]
        values, _ = moments(factor, -np.asarray(eta, dtype=float).reshape(-1, 1), self.tol)
        return np.broadcast_to(values, (len(groups), len(values)))

    def error_estimate(self, f_norm1: float, max_l1: int) -> float:
        return 0.0


def prefix_plan(m: Any, orders: tuple[int, ...], depth: int, tol: float = DEFAULT_TOL) -> _Plan:
    """Plan for a product or a DigitIFS of dimension at least 2."""
    if isinstance(m, ProductMeasure):
        return ProductPlan(m, orders, tol)
    if isinstance(m, DigitIFS) and m.dim >= 2:
        return PrefixPlan(m, orders, depth, tol)
    raise UnsupportedMeasureError(f"no prefix quadrature for {m!r}")
