"""Exception hierarchy shared by every module of the package."""


class SdmmError(Exception):
    """Base class for all errors raised by linsdmm."""


class FieldMismatch(SdmmError, TypeError):
    """Elements (or codes) over different fields were combined."""


class DivisionByZero(SdmmError, ZeroDivisionError):
    pass


class NoRootOfUnity(SdmmError, ValueError):
    pass


class InvalidPoints(SdmmError, ValueError):
    """Evaluation points are repeated, or multipliers contain zero."""


class InvalidParams(SdmmError, ValueError):
    pass


class ShapeError(SdmmError, ValueError):
    pass


class TooLarge(SdmmError):
    """A brute-force computation would exceed its enumeration budget."""


class NotDecodable(SdmmError):
    pass


class InsufficientResponses(SdmmError):
    pass


class InsufficientData(SdmmError):
    pass


class ConstructionFailed(SdmmError):
    pass


class PipelineFailure(SdmmError):
    """Collaborative error location failed; ``diagnostic`` holds the details."""

    def __init__(self, message, diagnostic=None):
        super().__init__(message)
        self.diagnostic = dict(diagnostic or {})
