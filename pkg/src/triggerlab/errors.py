"""Exception types shared across the package.

The CLI maps these onto exit codes: invalid input and unsupported
parameters are usage errors (1), exceeded computation guards and
precision failures are resource errors (2), file problems are I/O
errors (3).
"""


class TriggerLabError(Exception):
    """Base class for package-specific errors."""


class InvalidInputError(TriggerLabError, ValueError):
    """An argument violates a documented precondition."""


class UnsupportedParameterError(TriggerLabError):
    """The operation is only defined for a restricted parameter set."""


class UnreachableTargetError(TriggerLabError):
    """No window length can reach the requested confidence."""


class InstanceTooLargeError(TriggerLabError):
    """A computation guard was exceeded."""


class PrecisionError(TriggerLabError):
    """Floating point cannot decide the result reliably."""


class ParseError(TriggerLabError, ValueError):
    """Token text could not be parsed; carries the character position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class DatasetFormatError(TriggerLabError):
    """A dataset file is malformed; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
