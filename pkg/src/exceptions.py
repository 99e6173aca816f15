"""
Error hierarchy for the CHoS toolkit.
"""


class ChosError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(ChosError, ValueError):
    """Invalid input; the message names the offending field."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class ConfigError(ChosError):
    """Malformed run configuration file or flag combination."""


class SingularConfigurationError(ChosError):
    """A slow-light quantity was requested where none exists (Δ = 0)."""


class ConsistencyError(ChosError):
    """An internal numerical self-check failed."""


class DivergenceError(ChosError):
    """The integrated state became non-finite."""

    def __init__(self, step: int, message: str = "non-finite state"):
        self.step = step
        super().__init__(f"{message} at step {step}")


class MissingSnapshotsError(ChosError):
    """An operation needs space-time snapshots the result does not carry."""


class MetricsError(ChosError):
    """A figure of merit cannot be computed for the given result."""


class FitError(ChosError):
    """A least-squares fit is degenerate."""


class RegimeError(ChosError):
    """Sample points fall outside the regime an analysis assumes."""
