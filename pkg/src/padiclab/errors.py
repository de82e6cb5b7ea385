"""Exception types raised across the package."""


class PadicLabError(Exception):
    """Base class for all package errors."""


class InvalidModulusError(PadicLabError, ValueError):
    pass


class ShapeError(PadicLabError, ValueError):
    pass


class DomainError(PadicLabError, ValueError):
    pass


class MalformedExpansionError(PadicLabError, ValueError):
    pass


class SizeError(PadicLabError, ValueError):
    pass


class SamplingError(PadicLabError, RuntimeError):
    pass


class ParseError(PadicLabError, ValueError):
    """Malformed matrix text; ``line`` and ``column`` are 1-based when known."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
