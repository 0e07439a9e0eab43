"""Exception types shared across the verifier.

Each class subclasses the built-in exception a caller would catch anyway,
so ``except ValueError`` around a config load still works.
"""


class NotOnGrid(ValueError):
    """A value is not a carrier point of the grid it is snapped to."""


class OutOfRange(ValueError):
    """A value lies outside the unit interval."""


class ConstructionError(ValueError):
    """An operator spec is inconsistent or its table fails the axiom suite."""


class PreconditionViolated(RuntimeError):
    """A check was called on inputs that do not satisfy its premise."""


class ShapeMismatch(ValueError):
    """A pair of subclass tags matches no specialisation shape."""


class BudgetExceeded(RuntimeError):
    """A count or time budget ran out before a job finished.

    ``partial`` holds whatever was produced before the budget expired.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class _LineError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ParseError(_LineError):
    """The config text is malformed."""


class ValidationError(_LineError):
    """The config text parses but describes an invalid run."""
