"""Exception types raised across the disaster-chain toolkit."""


class DisasterError(Exception):
    """Base class for every error raised by this package."""


class InvalidSpecError(DisasterError, ValueError):
    """Model parameters that violate one of their invariants."""

    def __init__(self, invariant: str, message: str):
        self.invariant = invariant
        super().__init__(f"[{invariant}] {message}")


class DomainError(DisasterError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class MissingRateLayerError(DisasterError):
    """A continuous-time quantity was requested for a spec without rates."""


class NoInvariantMeasureError(DisasterError):
    """The chain is transient, so no invariant measure exists."""


class DivergentSeriesError(DisasterError, ArithmeticError):
    """A series was asked to converge where it does not."""


class UnsupportedRegimeError(DisasterError):
    """No closed form is known in this parameter regime."""


class NotApplicableError(DisasterError):
    """The diagnostic does not apply to the given law."""


class ConfigError(DisasterError):
    """A configuration value could not be parsed."""
