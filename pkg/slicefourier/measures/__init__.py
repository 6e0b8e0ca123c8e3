"""
Measure core.

This package handles the measures themselves: digit systems, atoms and
products, their Fourier moments, chaos-game sampling, marginals and
digit-level disintegration, and exact inner products of trig polynomials.
"""

from .types import (
    AtomicMeasure,
    DigitIFS,
    Measure,
    ProductMeasure,
    cantor,
    dirac,
    half_atomic,
    lebesgue,
    menger,
)
from .moments import (
    DEFAULT_TOL,
    MAX_DEPTH,
    MomentTable,
    moment,
    moment_gram,
    moment_table,
    moments,
    truncation_depth,
)
from .sampling import chaos_digits, chaos_sample, digits_to_points, empirical_moment
from .disintegration import (
    SliceLaw,
    conditional_laws,
    head_marginal,
    is_swap_symmetric,
    last_coordinate,
    marginal,
    permute_coordinates,
    slice_law,
    swap_coordinates,
)
from .inner import l2_norm, trig_inner

__all__ = [
    "AtomicMeasure",
    "DigitIFS",
    "Measure",
    "ProductMeasure",
    "cantor",
    "dirac",
    "half_atomic",
    "lebesgue",
    "menger",
    "DEFAULT_TOL",
    "MAX_DEPTH",
    "MomentTable",
    "moment",
    "moment_gram",
    "moment_table",
    "moments",
    "truncation_depth",
    "chaos_digits",
    "chaos_sample",
    "digits_to_points",
    "empirical_moment",
    "SliceLaw",
    "conditional_laws",
    "head_marginal",
    "is_swap_symmetric",
    "last_coordinate",
    "marginal",
    "permute_coordinates",
    "slice_law",
    "swap_coordinates",
    "l2_norm",
    "trig_inner",
]
