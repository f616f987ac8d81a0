"""Exception hierarchy shared across the package."""


class BeliefNetError(Exception):
    """Base class for all errors raised by this package."""


class CycleError(BeliefNetError):
    """The parent relation contains a directed cycle."""


class DisjointnessError(BeliefNetError):
    """Node sets passed to a separation query overlap."""


class SelfParentError(BeliefNetError):
    """A variable was listed in its own parent set."""


class ZeroCasesError(BeliefNetError):
    """An operation that needs at least one case got an empty database."""


class SchemaMismatchError(BeliefNetError):
    """Two objects declare different variable lists or arities."""


class TooManyVariablesError(BeliefNetError):
    """Exhaustive search was asked for more variables than its guard allows."""


class EmptyFamilyError(BeliefNetError):
    """A weighted mixture needs at least one parent-set entry."""


class SupportError(BeliefNetError):
    """The estimated distribution assigns zero mass where the reference is positive."""


class SizeError(BeliefNetError):
    """Joint-space enumeration was refused because the state space is too large."""


class ParseError(BeliefNetError):
    """A file could not be parsed.

    Carries the offending line number (1-based) when known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SchemaError(BeliefNetError):
    """A parsed file is syntactically valid but internally inconsistent."""
