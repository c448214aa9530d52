"""Exception types shared across the package."""


class SpindleError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(SpindleError, ValueError):
    """An argument is outside the documented domain of an operation."""


class DegeneracyError(DomainError):
    """Input points are affinely dependent (or otherwise degenerate)."""


class InfeasibleError(SpindleError, RuntimeError):
    """A required feasible region (e.g. the center body) is empty."""


class GateError(SpindleError, ValueError):
    """An experiment's eligibility precondition is violated."""


class ConfigError(SpindleError, ValueError):
    """A configuration file or command-line flag could not be resolved."""
