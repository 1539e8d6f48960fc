"""Exception hierarchy shared by all sgff modules."""


class SgffError(Exception):
    """Base class for all library errors."""


class DomainError(SgffError):
    """Input outside the mathematical domain of an operation."""


class ResonanceError(SgffError):
    """A denominator that is generically nonzero vanishes at the sampled
    parameters (root-of-unity collision, cotangent pole, ...)."""


class TruncationError(SgffError):
    """A series was truncated at too low an order for the requested output."""


class SplitError(SgffError):
    """No solution of the m/n decomposition exists in the declared windows."""


class StructureError(SgffError):
    """A composite object is missing a component needed by the operation."""


class PreconditionError(SgffError):
    """An explicit precondition (index ordering, arity matching, ...) failed."""


class KacError(SgffError):
    """Requested a singular vector away from the Kac line."""


class UnsupportedError(SgffError):
    """The operation is outside the supported range of this library."""


class UsageError(SgffError):
    """Malformed CLI invocation or configuration."""
