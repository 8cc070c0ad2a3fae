"""Exception types shared by the whole package.

Each class carries the CLI exit code used when it escapes a command.
"""


class TransportError(Exception):
    exit_code = 1


class ParseError(TransportError, ValueError):
    """Malformed textual input (numbers, forms, JSON documents)."""

    exit_code = 2

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None and column is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class PreconditionError(TransportError, ValueError):
    """An operation was called outside its domain."""

    exit_code = 3


class ContextMismatch(PreconditionError):
    pass


class PrecisionError(TransportError, ArithmeticError):
    """Working precision ran out before a result could be certified."""

    exit_code = 4


class UniquenessError(TransportError):
    """The space of candidate canonical elements is not a single point."""

    exit_code = 5

    def __init__(self, message, level=None, dimension=None):
        self.level = level
        self.dimension = dimension
        super().__init__(message)
