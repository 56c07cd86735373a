"""Exception and warning types shared across the package."""


class KoszulError(Exception):
    """Base class for all package errors."""


class ZeroInverse(KoszulError, ZeroDivisionError):
    pass


class FieldMismatch(KoszulError, ValueError):
    pass


class NotARoot(KoszulError, ValueError):
    pass


class InvalidPrime(KoszulError, ValueError):
    pass


class FieldTooSmall(KoszulError, ValueError):
    pass


class ModelMismatch(KoszulError, ValueError):
    pass


class InvalidNode(KoszulError, ValueError):
    pass


class BadDimensions(KoszulError, ValueError):
    pass


class OutOfRange(KoszulError, IndexError):
    pass


class ParseError(KoszulError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class IndexOutOfRange(ParseError):
    pass


class TooLarge(KoszulError, ValueError):
    pass


class NonConvergence(KoszulError, RuntimeError):
    pass


class PrimeTooSmall(UserWarning):
    """Field too small for the Monte Carlo failure bound of Wiedemann rank."""


class GenericityWarning(UserWarning):
    """Kernel dimension changed between random parameter choices."""
