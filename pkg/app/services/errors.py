"""Exception hierarchy shared by the optimisation services."""
from __future__ import annotations

from typing import Sequence


class RdkwError(Exception):
    """Base class for every optimisation-library error."""


class InvalidDimensionError(RdkwError):
    """Raised when a perturbation or objective dimension is not a positive integer."""
    def __init__(self, dimension: int) -> None:
        super().__init__(f"Dimension must be a positive integer, got {dimension}.")
        self.dimension = dimension


class DimensionMismatchError(RdkwError):
    """Raised when a vector does not match the dimension it is used with."""
    def __init__(self, expected: int, actual: int, what: str = "theta") -> None:
        super().__init__(f"Dimension mismatch for {what}: expected {expected}, got {actual}.")
        self.expected = expected
        self.actual = actual


class InvalidSensitivityError(RdkwError):
    """Raised when a finite-difference sensitivity delta is not positive."""
    def __init__(self, delta: float) -> None:
        super().__init__(f"Sensitivity delta must be > 0, got {delta}.")
        self.delta = delta


class EstimationError(RdkwError):
    """Raised when a gradient estimate cannot be formed from the measurements."""


class UndefinedMetricError(RdkwError):
    """Raised when NMSE is requested with theta0 equal to theta_star."""


class ConfigurationError(RdkwError):
    """Raised when an optimiser or experiment configuration is inconsistent."""


class BudgetExhaustedError(RdkwError):
    """Raised when a step would spend more simulations than the budget allows."""
    def __init__(self, used: int, cost: int, budget: int) -> None:
        super().__init__(
            f"Simulation budget exhausted: {used} used, step needs {cost}, budget is {budget}."
        )
        self.used = used
        self.cost = cost
        self.budget = budget


class ScheduleValidationError(RdkwError):
    """Raised when a step-size schedule violates the convergence conditions."""
    def __init__(self, violations: Sequence[str]) -> None:
        super().__init__("Step-size schedule violates: " + "; ".join(violations))
        self.violations = list(violations)


class ExperimentNotFoundError(RdkwError):
    """Raised when no stored results exist for an experiment id."""
    def __init__(self, experiment_id: str) -> None:
        super().__init__(f"Experiment {experiment_id} not found.")
        self.experiment_id = experiment_id


class ExperimentLimitError(RdkwError):
    """Raised when an experiment request exceeds the configured service limits."""
