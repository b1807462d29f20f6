"""Exception hierarchy shared across the package."""


class EpcountError(Exception):
    """Base class for all errors raised by epcount."""


class ParseError(EpcountError):
    """Syntax or semantic error in a formula/structure source file."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None,
                 path: str | None = None):
        self.line = line
        self.col = col
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
            if col is not None:
                where += f"{col}:"
        super().__init__(f"{where} {message}" if where else message)


class ValidationError(EpcountError):
    """A value violates one of its declared invariants."""


class SignatureMismatchError(EpcountError):
    """Two values that must share a signature do not."""


class LibMismatchError(EpcountError):
    """Formulas with different liberal-variable sets where identical sets are required."""


class PreconditionError(EpcountError):
    """An operation was called on inputs violating its stated precondition."""


class OracleInconsistencyError(EpcountError):
    """An injected count oracle returned values no exact counting function could."""


class SearchExhaustedError(EpcountError):
    """A bounded witness/structure search ran out of candidates below its cap."""


class GraphTooLargeError(EpcountError):
    """Graph exceeds the exact-treewidth size limit; carries the known bounds."""

    def __init__(self, n_vertices: int, lower: int, upper: int):
        self.n_vertices = n_vertices
        self.lower = lower
        self.upper = upper
        super().__init__(
            f"graph with {n_vertices} vertices exceeds exact treewidth limit; "
            f"bounds: {lower} <= tw <= {upper}")
