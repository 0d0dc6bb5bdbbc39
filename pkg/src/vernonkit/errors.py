"""Exception hierarchy shared by every module."""


class VernonError(Exception):
    """Base class for all errors raised by vernonkit."""


class GridError(VernonError, ValueError):
    """Malformed or mismatched grid, or bad samples on a grid."""


class ModelError(VernonError, ValueError):
    """Invalid physical parameters (bath, cavity, coupling)."""


class NumericalError(VernonError, ArithmeticError):
    """A computation diverged or hit a singular point."""


class ConfigError(VernonError, ValueError):
    """Scenario file could not be parsed or validated."""
