"""
slice-fourier - Fourier expansions for singular and slice-singular measures

Expand functions in L²(μ) for singular measures on the torus by
non-orthogonal Fourier series (Kaczmarz / auxiliary-sequence
coefficients), in one dimension and, slice by slice, in several, and
evaluate the associated Cauchy-type transforms on the polydisk.
"""

__version__ = "0.1.0"

from .expansion import CoeffTensor, analyze, analyze_staged, reconstruction_error, synthesize
from .transforms import boundary_limit_test, inner_function, nct_1d, nct_d, nct_equality_test

__all__ = [
    "CoeffTensor",
    "analyze",
    "analyze_staged",
    "boundary_limit_test",
    "inner_function",
    "nct_1d",
    "nct_d",
    "nct_equality_test",
    "reconstruction_error",
    "synthesize",
    "__version__",
]
