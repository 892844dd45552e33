"""
Domain exceptions for the dimension-reduction toolkit.
"""


class SdrError(Exception):
    """Domain Exception: base class for all toolkit errors"""
    pass


class InvalidInputError(SdrError, ValueError):
    """Domain Exception: arguments violate an operation's preconditions"""
    pass


class UnsupportedLevelError(InvalidInputError):
    """Domain Exception: overlap level not handled by the requested form"""
    pass


class InvalidBasisError(InvalidInputError):
    """Domain Exception: basis is not of full column rank"""
    pass


class SingularCovarianceError(SdrError):
    """Domain Exception: covariance cannot be factored; raise the ridge"""
    pass


class DegenerateSpectrumError(SdrError):
    """Domain Exception: every eigenvalue is zero"""
    pass


class UndefinedCorrelationError(SdrError):
    """Domain Exception: correlation with a zero-variance series"""
    pass


class IngestionError(SdrError):
    """Infrastructure Exception: dataset file could not be read"""
    pass


class UsageError(SdrError):
    """Application Exception: invalid parameter combination"""
    pass
