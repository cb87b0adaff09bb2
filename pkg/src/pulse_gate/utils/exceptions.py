"""
Exception hierarchy for the pulse gate simulator.
"""


class PulseGateError(Exception):
    """Base class of every error raised by the package."""


class InvalidParameter(PulseGateError, ValueError):
    """A precondition of an operation is violated."""


class GridError(InvalidParameter):
    """A frequency grid is too narrow, too coarse or does not match."""


class NormalizationError(InvalidParameter):
    """Projections violate the normalization condition sum |mu_n|^2 = 1."""


class UnsupportedModeCount(InvalidParameter):
    """The operation is only defined for a specific number of matched modes."""


class ModeIndexError(PulseGateError, IndexError):
    """A mode index is out of range or a mode map is not injective."""


class InvalidState(PulseGateError):
    """Moment matrices do not describe a physical Gaussian state."""


class DecompositionError(PulseGateError):
    """A numerical decomposition did not converge or is inaccurate."""


class TruncationError(PulseGateError):
    """A truncated Fock space is too small for the requested state."""


class ConfigError(PulseGateError):
    """A scenario config is invalid; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}" if path else message)


class InvariantViolation(PulseGateError):
    """A numerical invariant residual exceeds its tolerance."""
