"""Exception hierarchy for diamondgap."""


class DiamondError(Exception):
    """Base class for all diamondgap errors."""


class DomainError(DiamondError):
    """Input outside the mathematical domain of an operation.

    Raised for non-square / non-symmetric matrices where symmetry is
    required, non-finite entries, non-positive powers, indefinite
    matrices passed where PSD is required, and similar violations.
    """


class SingularMatrixError(DiamondError):
    """A matrix that must be invertible is singular to working precision."""


class NotApplicableError(DiamondError):
    """The requested analysis does not apply to this channel (delta <= 0)."""


class DegenerateChannelError(DiamondError):
    """A cut capacity needed by the protocol is zero, so time-sharing
    ratios are undefined."""


class ParseError(DiamondError):
    """A channel document could not be parsed (bad JSON, missing or
    malformed field)."""


class SchemaError(DiamondError):
    """A channel document parsed but violates the schema (wrong shapes,
    inconsistent dimensions)."""
