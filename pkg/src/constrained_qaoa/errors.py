class ConstrainedQAOAError(Exception):
    """Base class for errors raised by this package."""


class ParameterError(ConstrainedQAOAError, ValueError):
    """Invalid argument: wrong length, out-of-range value, bad shape."""


class CapabilityError(ConstrainedQAOAError):
    """The request exceeds what the implementation supports (e.g. graph too large)."""


class FeasibilityError(ConstrainedQAOAError, ValueError):
    """A bitstring that must be an independent set is not one."""


class ObjectiveError(ConstrainedQAOAError, ArithmeticError):
    """The objective returned a non-finite value."""

    def __init__(self, message, params=None):
        super().__init__(message)
        self.params = params


class UndefinedRatioError(ConstrainedQAOAError, ZeroDivisionError):
    """Approximation ratio requested with a zero denominator."""
