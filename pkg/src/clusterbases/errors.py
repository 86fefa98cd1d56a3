"""Exception hierarchy shared by all modules."""


class ClusterError(Exception):
    """Base class for every error raised by this package."""

    kind = "error"


class ConfigurationError(ClusterError):
    """Input data violates a precondition (rank, skew-symmetrizability, ...)."""

    kind = "configuration"


class UsageError(ClusterError):
    """An operation was called with arguments it does not accept."""

    kind = "usage"


class InvariantViolation(ClusterError):
    """A property that is a theorem failed to hold.

    Either the input is outside the theorem's hypotheses or there is a bug;
    in both cases the computation cannot be trusted and is stopped.
    """

    kind = "invariant"


class InexactDivision(InvariantViolation):
    kind = "inexact-division"


class FamilyContractError(ClusterError):
    """A pointed family returned an element not pointed at the requested degree."""

    kind = "family-contract"


class DeformationError(ClusterError):
    kind = "deformation"


class UnsupportedRegion(ClusterError):
    """Degree lies where theta functions are not computed (outside cluster chambers)."""

    kind = "unsupported-region"


class ParseError(ClusterError):
    kind = "parse"
