"""Exception hierarchy shared by every qsr module."""

from __future__ import annotations


class QsrError(Exception):
    """Base class for all errors raised by qsr."""


class InvalidParameter(QsrError, ValueError):
    pass


class DimensionMismatch(QsrError, ValueError):
    pass


class StructureViolation(QsrError, ValueError):
    """A matrix or parameter set breaks a required structural identity.

    ``field`` names the offending input (``"F"``, ``"M"``, ...) when known and
    ``residual`` is the max-entry violation that triggered the error.
    """

    def __init__(self, message: str, *, field: str | None = None, residual: float | None = None):
        super().__init__(message)
        self.field = field
        self.residual = residual


class NotRealizable(QsrError, ValueError):
    def __init__(self, message: str, *, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class NumericalError(QsrError, ArithmeticError):
    """Base for failures caused by (near-)singular linear algebra."""


class SingularMatrix(NumericalError):
    def __init__(self, message: str, *, rcond: float | None = None):
        super().__init__(message)
        self.rcond = rcond


class SingularFastDynamics(NumericalError):
    """The fast block cannot be eliminated; ``rcond`` is its reciprocal condition number."""

    def __init__(self, message: str, *, rcond: float | None = None):
        super().__init__(message)
        self.rcond = rcond


class InternalInconsistency(QsrError, RuntimeError):
    """Two independent evaluations of the same quantity disagree (a bug, not bad data)."""


class MalformedInput(QsrError, ValueError):
    def __init__(self, message: str, *, line: int | None = None, column: int | None = None):
        super().__init__(message)
        self.line = line
        self.column = column


class IoError(QsrError, OSError):
    pass
