"""Exception hierarchy shared by all prodspace modules."""


class ProdspaceError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(ProdspaceError):
    """Input file does not have the required columns."""


class ParseError(ProdspaceError):
    """A cell could not be parsed; carries the 1-based file line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InputError(ProdspaceError):
    """Arguments violate an operation's contract."""


class DegenerateInputError(InputError):
    """Input is structurally valid but degenerate (e.g. empty at-risk set)."""


class SingularityError(ProdspaceError):
    """A matrix that must be invertible or positive is not."""


class DegeneracyError(ProdspaceError):
    """An eigenvector is not uniquely defined (e.g. disconnected graph)."""


class RankDeficiencyError(ProdspaceError):
    """Design matrix columns are linearly dependent."""

    def __init__(self, message: str, columns: list[str] | None = None):
        self.columns = columns or []
        super().__init__(message)


class SeparationError(ProdspaceError):
    """Logit likelihood is unbounded (complete or quasi-complete separation)."""


class NumericalError(ProdspaceError):
    """A numerical identity that must hold was violated."""
