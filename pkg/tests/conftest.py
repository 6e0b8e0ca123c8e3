"""Shared measures and paths for the test suite."""

from pathlib import Path

import numpy as np
import pytest

from slicefourier.measures import (
    AtomicMeasure,
    DigitIFS,
    ProductMeasure,
    cantor,
    half_atomic,
    lebesgue,
    menger,
)

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture
def configs_dir() -> Path:
    return CONFIGS


@pytest.fixture
def cantor_measure() -> DigitIFS:
    return cantor()


@pytest.fixture
def cantor2() -> ProductMeasure:
    return ProductMeasure((cantor(), cantor()), name="cantor2")


@pytest.fixture
def half_atomic2() -> ProductMeasure:
    return ProductMeasure((half_atomic(), half_atomic()), name="half_atomic2")


@pytest.fixture
def symmetric2() -> DigitIFS:
    """Swap-symmetric, slice singular, not a product."""
    digits = [[0, 0], [2, 2], [0, 2], [2, 0]]
    return DigitIFS(3, 2, digits, [0.4, 0.4, 0.1, 0.1], name="symmetric2")


@pytest.fixture
def carpet() -> DigitIFS:
    grid = [[l, m] for l in range(3) for m in range(3) if (l, m) != (1, 1)]
    return DigitIFS(3, 2, grid, np.full(8, 1 / 8), name="carpet")


@pytest.fixture
def menger_measure() -> DigitIFS:
    return menger()


@pytest.fixture
def lebesgue2() -> DigitIFS:
    return lebesgue(2)


@pytest.fixture
def atoms2() -> AtomicMeasure:
    """Three atoms whose slices differ above x_1 = 0 and x_1 = 1/2."""
    return AtomicMeasure([[0.0, 0.0], [0.0, 0.5], [0.5, 0.25]], [0.5, 0.25, 0.25])
