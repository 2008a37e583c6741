"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid input or parameter combination (CLI exit code 2)."""


class NumericalError(RuntimeError):
    """Numeric failure: non-convergence, resolution guard, trace drift (CLI exit code 3)."""
