"""Exception types raised across the package."""


class PhiCoupleError(Exception):
    """Base class for all package errors."""


class NonFiniteError(PhiCoupleError, ValueError):
    """A computed quantity became NaN or infinite.

    Attributes:
        index: grid node index (or iteration index) where it happened.
        detail: free-form context, e.g. the arguments passed to a nonlinearity.
    """

    def __init__(self, message: str, index: int | None = None, detail=None):
        super().__init__(message)
        self.index = index
        self.detail = detail


class InvalidParameterError(PhiCoupleError, ValueError):
    """A constructor or operation received an argument outside its domain."""


class ProblemValidationError(PhiCoupleError):
    """A problem component failed a fatal hypothesis check."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class QuadratureError(PhiCoupleError):
    """Adaptive quadrature hit its depth limit before meeting the tolerance."""

    def __init__(self, message: str, partial: float):
        super().__init__(message)
        self.partial = partial
