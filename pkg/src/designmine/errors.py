"""Exception types shared across the engine.

The service layer maps these onto HTTP status codes, so anything a caller
may want to branch on gets its own class.
"""

from __future__ import annotations


class DesignMineError(Exception):
    """Base class for all engine errors."""


class CorruptDumpError(DesignMineError):
    """More than the tolerated share of dump lines failed to parse."""


class ConfigurationError(DesignMineError):
    """Invalid or missing configuration (empty gazetteer, bad weights, ...)."""


class NotFoundError(DesignMineError):
    """A referenced post, comment, map, or node does not exist."""


class UnknownClusterError(DesignMineError):
    """A facet query named a cluster that is not in the taxonomy."""


class UnmappedTermError(DesignMineError):
    """Canonical terms without a cluster assignment. Carries the orphans."""

    def __init__(self, orphans: list[tuple[str, str]]):
        self.orphans = orphans
        shown = ", ".join(f"{kind}:{term}" for kind, term in orphans[:10])
        more = "" if len(orphans) <= 10 else f" (+{len(orphans) - 10} more)"
        super().__init__(f"terms without cluster assignment: {shown}{more}")


class ProviderError(DesignMineError):
    """A classifier or embedding provider violated its contract."""


class StructuringError(DesignMineError):
    """Provider failure while structuring one comment. Carries the comment id."""

    def __init__(self, comment_id: str, message: str):
        self.comment_id = comment_id
        super().__init__(f"comment {comment_id}: {message}")


class NoLinkError(DesignMineError):
    """Jump requested on a mindmap node that has no (post, comment) link."""


class StaleLinkError(DesignMineError):
    """A mindmap node links to a post/comment no longer in the corpus."""


class RevisionConflictError(DesignMineError):
    """Optimistic concurrency check failed. Carries the current revision."""

    def __init__(self, current: int, expected: int):
        self.current = current
        self.expected = expected
        super().__init__(f"revision conflict: map is at {current}, mutation expected {expected}")


class TreeError(DesignMineError):
    """A mutation would break the mindmap tree invariants."""


class MapImportError(DesignMineError):
    """An imported mindmap document is malformed. Carries a location hint."""

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{message}" + (f" (at {location})" if location else ""))


class EventOrderError(DesignMineError):
    """Session event timestamps went backwards."""


class SchemaVersionError(DesignMineError):
    """An artifact file has the wrong schema kind or version."""
