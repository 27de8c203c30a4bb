"""Exception types shared across the toolkit.

All domain errors derive from SherdKitError so callers can catch the whole
family with one clause. File-system failures are deliberately NOT wrapped:
open()/write() raise OSError and that is what propagates.
"""


class SherdKitError(Exception):
    """Base class for all domain errors raised by this package."""


class ParseError(SherdKitError):
    """Malformed input that cannot be tokenized or decoded.

    For text formats the message includes a 1-based line number; for binary
    formats a byte offset.
    """


class ValidationError(SherdKitError):
    """Structurally well-formed input that violates a semantic constraint."""


class SpecError(SherdKitError):
    """A synthesis or fragmentation request that cannot be satisfied."""


class DegenerateGeometryError(SherdKitError):
    """Geometry too flat, too small, or too noisy to support an estimate."""


class GapError(SherdKitError):
    """A thickness sample in the interior of the profile could not be measured."""

    def __init__(self, station: int, message: str | None = None):
        self.station = station
        super().__init__(message or f"no inner-surface hit at interior station {station}")


class NoOverlapError(SherdKitError):
    """Requested offset leaves the two profiles with no overlapping samples."""


class StepMismatchError(SherdKitError):
    """Profiles sampled at different steps cannot be compared."""


class NoFeasibleOffsetError(SherdKitError):
    """No integer offset yields at least the configured minimum overlap."""


class EmptyInputError(SherdKitError):
    """An operation received an empty collection where at least one item is required."""


class UnknownSherdError(SherdKitError):
    """A sherd id was referenced that is not part of the session."""


class NotACandidateError(SherdKitError):
    """A commit was requested for a sherd that is not the proposed candidate."""


class NothingToUndoError(SherdKitError):
    """Undo was requested on an empty decision log."""
