"""Exception hierarchy shared across the package."""

from __future__ import annotations


class BugscribeError(Exception):
    """Base class for all package errors."""


class EmptyInputError(BugscribeError):
    """Raised when a text operation receives empty or whitespace-only input."""


class NotFoundError(BugscribeError):
    """Unknown fingerprint, session, app, or step index."""

    def __init__(self, message: str, reason: str = "not-found"):
        super().__init__(message)
        self.reason = reason


class ModelIntegrityError(BugscribeError):
    """An edge references a screen that is not registered in the model."""


class TraceParseError(BugscribeError):
    """Trace bytes are not well-formed; carries the byte offset when known."""

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message)
        self.offset = offset


class TraceValidationError(BugscribeError):
    """Trace parsed but violates the schema; names the field and event."""

    def __init__(self, message: str, field: str | None = None, sequence: int | None = None):
        super().__init__(message)
        self.field = field
        self.sequence = sequence


class FixtureSpecError(BugscribeError):
    """Fixture spec is unreachable or not realizable by LAUNCH-anchored traces."""


class ProtocolError(BugscribeError):
    """A dialogue event arrived in a phase that does not accept it."""


class InvalidOptionError(BugscribeError):
    """A selection referenced an id outside the pending suggestion set."""


class StalePredictionError(BugscribeError):
    """The session state changed since the prediction cursor was issued."""


class BusyError(BugscribeError):
    """A second concurrent event for the same session or app ingestion."""
