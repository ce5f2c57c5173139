"""Exception types shared across the package."""

from __future__ import annotations


class RepchainError(Exception):
    """Base class for all package errors."""


class ConfigError(RepchainError, ValueError):
    """Invalid user-supplied configuration or parameter value."""


class NonIntegerSlot(ConfigError):
    """A propagation delay does not land on an integer number of microseconds."""


class OutOfRange(ConfigError):
    """A parameter lies outside its admissible domain."""


class DegenerateLog(ConfigError):
    """An improvement factor was requested for perfect hardware (p_NI = 1)."""


class UnknownPreset(ConfigError):
    """The requested preset name is not defined."""


class DivergentSeries(RepchainError, ArithmeticError):
    """An infinite series was requested whose geometric ratio is not below 1."""


class EmptyCutoffDomain(RepchainError):
    """No admissible cut-off time exists for the given coherence time."""


class Infeasible(RepchainError):
    """No cut-off time reaches the target fidelity."""
