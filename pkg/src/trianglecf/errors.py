"""Exception types shared across the library."""


class TriangleCFError(Exception):
    """Base class for all library errors."""


class DomainError(TriangleCFError):
    """An argument lies outside the domain of the requested operation."""


class PrecisionExhausted(TriangleCFError):
    """A numeric decision could not be made within the precision cap.

    Carries the undecided quantity so callers can report which boundary
    was too close to call.
    """

    def __init__(self, message, boundary=None):
        super().__init__(message)
        self.boundary = boundary


class ConsistencyError(TriangleCFError):
    """An internal exact identity failed; indicates a construction bug."""
