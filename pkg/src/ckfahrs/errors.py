"""Exception hierarchy."""


class CkfAhrsError(Exception):
    """Base class for all errors raised by ckfahrs."""


class FactorizationFailed(CkfAhrsError, ArithmeticError):
    """Covariance matrix could not be factorized (not positive definite or not finite)."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class IllConditioned(CkfAhrsError, ArithmeticError):
    """Matrix inversion refused because the condition number exceeds the bound."""


class InitFailed(CkfAhrsError):
    """Static initialization could not produce an attitude."""


class FormatError(CkfAhrsError, ValueError):
    """Input file does not follow the documented layout."""


class DataError(CkfAhrsError, ValueError):
    """Input file parses but violates a data invariant (e.g. non-monotonic time)."""
