"""Benjamini-Schramm and Plancherel convergence checks on concrete lattice families."""

__version__ = "0.1.0"

from bslab.errors import BudgetExceeded, ConfigError, InvariantViolation

__all__ = ["BudgetExceeded", "ConfigError", "InvariantViolation", "__version__"]
