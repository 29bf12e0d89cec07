"""Exception types shared across the package."""


class FcqkdError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(FcqkdError, ValueError):
    """A physical parameter is out of its valid range."""


class DegenerateConfigurationError(FcqkdError):
    """No sideband light at all: both interference coefficients vanish."""


class PhaseUndefinedError(FcqkdError):
    """The interference phase offset is undefined (a coefficient is zero)."""


class TruncationError(FcqkdError):
    """Harmonic expansion order too low for the requested modulation depth."""


class InfeasibleProtocolError(FcqkdError):
    """The requested protocol cannot run on this modulator pairing.

    ``reason`` is one of ``"theta-mismatch"`` or ``"zero-visibility"``.
    """

    def __init__(self, reason: str, message: str = ""):
        self.reason = reason
        super().__init__(message or reason)


class ConfigError(FcqkdError):
    """Bad run configuration (unknown key, conflicting or missing values)."""
