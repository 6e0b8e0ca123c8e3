"""
Exception and warning types.

Validation problems (bad configs, bad arguments, unsupported measures)
derive from ValidationError; exhausted numeric budgets (truncation depth,
quadrature size, radius too close to the circle) derive from
NumericBudgetError. The CLI maps the two families to exit codes 2 and 3.
"""


class SliceFourierError(Exception):
    """Base class for all package errors."""

    code = "error"

    def to_dict(self) -> dict[str, str]:
        """Structured form written to the error stream by the CLI."""
        return {"error": self.code, "message": str(self)}


class ValidationError(SliceFourierError, ValueError):
    code = "validation"


class ConfigError(ValidationError):
    code = "config"


class UnsupportedMeasureError(ValidationError):
    code = "unsupported-measure"


class PrefixOutsideSupportError(ValidationError):
    code = "prefix-outside-support"


class DimensionTooSmallError(ValidationError):
    code = "dimension-too-small"


class NotSymmetricError(ValidationError):
    code = "not-symmetric"


class PointOutsideDiskError(ValidationError):
    code = "point-outside-disk"


class MissingMomentError(ValidationError):
    code = "missing-moment"


class NumericBudgetError(SliceFourierError, ArithmeticError):
    code = "numeric-budget"


class NonconvergentToleranceError(NumericBudgetError):
    code = "nonconvergent-tolerance"


class QuadratureBudgetError(NumericBudgetError):
    code = "quadrature-budget-exceeded"


class RadiusTooCloseError(NumericBudgetError):
    code = "radius-too-close-to-one"


class SingularReciprocalError(NumericBudgetError):
    code = "singular-reciprocal"


class PrecisionWarning(UserWarning):
    """A value sits within rounding distance of a decision threshold."""
