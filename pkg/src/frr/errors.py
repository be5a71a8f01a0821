class FrrError(Exception):
    """Base class for all errors raised by this package."""


class GraphError(FrrError, ValueError):
    pass


class PatternError(FrrError, ValueError):
    pass


class SizeGuardError(FrrError):
    """An exhaustive search would exceed its configured scenario budget."""


class DocumentError(FrrError, ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)
        self.line = line
        self.column = column
