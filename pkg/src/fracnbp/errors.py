"""Exception and warning types raised across the package."""


class FracNBError(Exception):
    """Base class for all package errors."""


class DivergentSeries(FracNBError, ValueError):
    """A series is evaluated outside its convergence domain (analytic gate)."""


class AccuracyLoss(FracNBError, ArithmeticError):
    """Cancellation or propagated rounding in a series exceeds the configured guard."""


class MaxTermsExceeded(FracNBError, ArithmeticError):
    """The truncation rule never triggered within ``max_terms``."""


class InvalidSupport(FracNBError, ValueError):
    pass


class EventBudgetExceeded(FracNBError, RuntimeError):
    """A simulation would generate more Poisson events than allowed."""


class EmptySample(FracNBError, ValueError):
    pass


class InsufficientSupport(FracNBError, ValueError):
    """Cell pooling left fewer than two cells for a chi-square test."""


class ClampWarning(RuntimeWarning):
    """A slightly negative series value was clamped to zero."""
