"""Exception types shared across the package."""


class DnfrtError(Exception):
    """Base class for library errors."""


class EmptySupport(DnfrtError):
    """A function with no satisfying assignment was given where one is required."""


class DimensionTooLarge(DnfrtError):
    """The dimension exceeds the exhaustive-enumeration cap."""


class CapExceeded(DnfrtError):
    """A brute-force routine was asked to go past its configured size cap."""


class LabelTooWide(DnfrtError):
    """A cluster label has more literals than the factored form allows."""


class DegenerateSpec(DnfrtError):
    """An instance specification keeps producing a degenerate function."""
