"""Exception types shared across the package.

Validation failures raise ValueError subclasses so callers can catch broad or
narrow as needed.  Resource guards raise ResourceLimitError, a RuntimeError,
because the inputs were legal and only the configured budget was exceeded.
"""


class InvalidParameterError(ValueError):
    """Network parameters out of range (K, L, mode, block length, ...)."""


class InvalidAssignmentError(ValueError):
    """Message assignment violates the cooperation constraints."""


class UnsupportedAssignmentError(InvalidAssignmentError):
    """Assignment is well formed but outside what the routine can analyze."""


class InvalidScheduleError(ValueError):
    """Schedule entries are malformed or not actually servable."""


class InvalidInputError(ValueError):
    """Malformed data passed to serialization or CLI plumbing."""


class ResourceLimitError(RuntimeError):
    """A configured size cap would be exceeded; raise instead of hanging."""

    def __init__(self, message: str, limit: int | None = None):
        super().__init__(message)
        self.limit = limit
