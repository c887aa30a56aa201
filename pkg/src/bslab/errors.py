class BudgetExceeded(RuntimeError):
    """An enumeration would exceed its configured size cap."""


class InvariantViolation(RuntimeError):
    """A checked mathematical invariant failed at runtime."""


class ConfigError(ValueError):
    """Experiment configuration is malformed."""
