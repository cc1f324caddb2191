"""Exceptions raised by weakmeter.

Numeric failures subclass ValueError so callers that only guard against bad
inputs keep working.
"""


class WeakmeterError(Exception):
    """Base class for all weakmeter errors."""


class InvalidState(WeakmeterError, ValueError):
    """A density matrix is not Hermitian, not positive or has a bad trace."""


class DegeneratePostSelection(WeakmeterError, ValueError):
    """The post-selected probability, or the denominator of the finite back-action prediction, vanishes."""


class ZeroResolution(WeakmeterError, ValueError):
    """The measurement resolution is zero, so no conditional value can be formed."""


class UnpolarizedInput(WeakmeterError, ValueError):
    """The input carries no polarization along the estimated Stokes axis."""


class DomainError(WeakmeterError, ValueError):
    """An argument lies outside the domain of a closed-form expression."""


class NoPostSelectedCounts(WeakmeterError):
    """No photon passed the post-selecting polarizers."""


class NoDetectedCounts(WeakmeterError):
    """Every photon of the budget went to the intensity monitor."""


class ConfigError(WeakmeterError):
    """Base class for run-configuration problems (CLI exit code 1)."""


class ConfigParseError(ConfigError):
    """A configuration document is not a well-formed ``key = value`` list."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigValidationError(ConfigError):
    """A configuration value is missing, malformed or out of bounds."""

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")
