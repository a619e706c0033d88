"""Exception hierarchy shared by every module."""


class RobustPRError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInstanceError(RobustPRError, ValueError):
    """An instance, ballot, profile or committee is malformed."""


class DomainError(RobustPRError, ValueError):
    """A numeric argument or precondition lies outside its domain."""


class ResourceLimitError(RobustPRError, RuntimeError):
    """An exhaustive computation would exceed its configured budget."""


class InstanceParseError(InvalidInstanceError):
    """An instance file could not be parsed or validated.

    ``line`` and ``column`` locate syntax errors in the raw text.  ``row``
    and ``col`` locate semantic errors inside a ballot array (``row`` is
    the voter index, ``col`` the position within the ballot).
    """

    def __init__(self, message, *, line=None, column=None, row=None, col=None):
        self.line = line
        self.column = column
        self.row = row
        self.col = col
        where = []
        if line is not None:
            where.append(f"line {line}, column {column}")
        if row is not None:
            where.append(f"row {row}" + (f", column {col}" if col is not None else ""))
        suffix = f" ({'; '.join(where)})" if where else ""
        super().__init__(message + suffix)
