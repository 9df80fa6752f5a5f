"""Solvers for multiple knapsack with a uniform cardinality bound per bin."""

from .core import (Configuration, FractionalSolution, Instance, Item, Solution, cover,
                   make_config, solution_value, validate_configuration)
from .errors import (BudgetError, CapacityError, CmkError, ConvergenceError, InputError,
                     InternalError, OracleTimeout, PreconditionError)

__version__ = "0.1.0"

__all__ = [
    "Configuration", "FractionalSolution", "Instance", "Item", "Solution", "cover",
    "make_config", "solution_value", "validate_configuration",
    "BudgetError", "CapacityError", "CmkError", "ConvergenceError", "InputError",
    "InternalError", "OracleTimeout", "PreconditionError",
]
