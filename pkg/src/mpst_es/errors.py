"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class SessionError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(SessionError):
    """Surface text could not be parsed."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


class ValidationError(SessionError):
    """A term violates a well-formedness rule of the syntax."""


class UndefinedName(ValidationError):
    pass


class NonContractive(ValidationError):
    """A name is bound, directly or through other names, to itself."""


class DuplicateBranchLabel(ValidationError):
    pass


class EmptyChoice(ValidationError):
    pass


class SelfCommunication(ValidationError):
    pass


class MixedChoice(ValidationError):
    """The branches of one choice address different peers."""


class NotEnabled(SessionError):
    """A transition was requested that the term cannot perform.

    ``index`` is the position of the failing step when running a trace.
    """

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class NotWellFormed(SessionError):
    pass


class Undefined(SessionError):
    """A partial operation (projection, residual) has no value here."""


class LabelCollision(SessionError):
    """Two configurations of one domain received the same label."""


class NotBinary(SessionError):
    pass


class GenerationExhausted(SessionError):
    pass
