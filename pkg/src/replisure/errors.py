"""Exception hierarchy shared by the library and the CLI."""


class ReplisureError(Exception):
    """Base class for all errors raised by replisure."""


class DomainError(ReplisureError, ValueError):
    """An argument lies outside the domain of the function."""


class BracketError(ReplisureError, ValueError):
    """The root-finding bracket does not enclose a sign change."""


class ConvergenceError(ReplisureError, ArithmeticError):
    """An iterative routine failed to reach its tolerance."""


class IngestionError(ReplisureError, ValueError):
    """A dataset file could not be parsed or failed validation.

    ``row`` is the 1-based data row (header excluded) and ``column`` the
    offending field, when known.
    """

    def __init__(self, message, row=None, column=None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        if where:
            message = f"{', '.join(where)}: {message}"
        super().__init__(message)


class PlanningError(ReplisureError, ValueError):
    """A sample-size target cannot be reached within the search range."""


class InversionError(ReplisureError, ArithmeticError):
    """A confidence limit could not be bracketed."""
