"""Exception hierarchy shared by every shiftlab module."""

from __future__ import annotations


class ShiftlabError(Exception):
    """Base class for library errors."""


class UsageError(ShiftlabError, ValueError):
    """Bad arguments: mixed groups, invalid descriptors, unmet preconditions."""


class GroupMismatchError(UsageError):
    pass


class NonAmenableGroupError(UsageError):
    """Raised when a Følner window is requested for a free group."""


class SpecError(UsageError):
    """Parse or validation failure for a subshift file."""

    def __init__(self, message: str, source: str | None = None, line: int | None = None):
        self.source = source
        self.line = line
        where = ""
        if source is not None:
            where = source if line is None else f"{source}:{line}"
        elif line is not None:
            where = f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)


class ResourceCapError(ShiftlabError):
    """A finite set would exceed the configured size cap."""


class BudgetExceeded(ShiftlabError):
    """The search-node budget ran out.

    ``partial`` carries whatever the interrupted computation had established
    (a partial count, a best-so-far set, ...).
    """

    def __init__(self, message: str = "node budget exhausted", partial=None, nodes: int = 0):
        super().__init__(message)
        self.partial = partial
        self.nodes = nodes


class GlueConflict(ShiftlabError):
    def __init__(self, site):
        self.site = site
        super().__init__(f"patterns disagree at {site!r}")


class EntropyUndefined(ShiftlabError):
    """The subshift is empty, so its entropy is undefined."""
