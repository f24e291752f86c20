"""Exception hierarchy shared by every layer of the verifier."""


class GoldbachError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(GoldbachError, ValueError):
    """An argument violates a documented precondition (parity, ordering, range)."""


class ResourceError(GoldbachError):
    """A requested allocation exceeds the configured or available memory."""


class InternalError(GoldbachError):
    """A consistency check inside the pipeline failed. Never expected."""


class UsageError(GoldbachError):
    """Bad command line."""


class WorkerError(GoldbachError):
    """Raised after all workers have stopped when at least one of them failed."""
