"""Exception types raised across the package."""


class RepliscopeError(Exception):
    """Base class for all repliscope errors."""


class InvalidProbabilityError(RepliscopeError):
    """A field that must be a probability lies outside its allowed range."""


class ShareSumError(RepliscopeError):
    """Kind base-rate shares do not sum to one within tolerance."""


class EmptyTargetError(RepliscopeError):
    """Targeted replication requested with an empty target tally set."""


class InvalidParamsError(RepliscopeError):
    """Structural parameter problem not covered by a more specific error."""


class MassBlowupError(RepliscopeError):
    """An iteration produced a non-finite mass."""


class ConvergenceError(RepliscopeError):
    """Fixed-point iteration failed to reach the requested tolerance."""


class NotFullCommunicationError(RepliscopeError):
    """The closed binomial series applies only under full communication
    with a single per-study positive rate; this configuration has neither."""


class RadicandError(RepliscopeError):
    """Closed-form radicand is non-positive for the given replication rate."""


class AllSuppressedError(RepliscopeError):
    """Every replication finding is suppressed, so probabilities conditional
    on communication are undefined."""


class EmptyTallyError(RepliscopeError):
    """No mass at the requested tally, so precision is undefined there."""


class KindExtinctError(RepliscopeError):
    """The requested kind carries zero total mass, so its conditional
    tally distribution is undefined."""


class BoundsMismatchError(RepliscopeError):
    """Two distributions do not share the same support or kind labels."""


class WindowError(RepliscopeError):
    """Aggregation window is empty or falls outside the table support."""


class StepSizeError(RepliscopeError):
    """Finite-difference step is too large for a one-sided derivative."""
