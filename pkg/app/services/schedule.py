"""Step-size and sensitivity sequences, checked against the stochastic-approximation gain conditions."""
from __future__ import annotations

import numpy as np

from app.core.logging import get_logger
from app.models import DEFAULT_STABILITY_FRACTION, A2Verdict, StepSchedule
from app.services.errors import ScheduleValidationError

logger = get_logger(__name__)

STEP_TO_ZERO = "a_n -> 0 needs alpha>0"
SENSITIVITY_TO_ZERO = "delta_n -> 0 needs gamma>0"
STEPS_DIVERGE = "sum a_n = inf needs alpha<=1"
GAIN_RATIO_SUMMABLE = "sum (a_n/delta_n)^2 < inf needs 2(alpha-gamma)>1"


def default_stability_offset(n_iterations: int) -> float:
    """B defaults to 10% of the iteration horizon."""
    return DEFAULT_STABILITY_FRACTION * n_iterations


def step_sizes(sched: StepSchedule, n: int) -> tuple[float, float]:
    a_n = sched.a_scale / (n + sched.B + 1.0) ** sched.alpha
    delta_n = sched.c / (n + 1.0) ** sched.gamma
    return a_n, delta_n


def step_size_arrays(sched: StepSchedule, n_iterations: int) -> tuple[np.ndarray, np.ndarray]:
    n = np.arange(n_iterations, dtype=float)
    a = sched.a_scale / (n + sched.B + 1.0) ** sched.alpha
    delta = sched.c / (n + 1.0) ** sched.gamma
    return a, delta


def validate_a2(sched: StepSchedule) -> A2Verdict:
    """
    Exponent form of a_n, delta_n -> 0, sum a_n = inf and sum (a_n/delta_n)^2 < inf
    for power-law gains. Every violated condition is reported.
    """
    violations: list[str] = []
    if not sched.alpha > 0:
        violations.append(STEP_TO_ZERO)
    if not sched.gamma > 0:
        violations.append(SENSITIVITY_TO_ZERO)
    if not sched.alpha <= 1:
        violations.append(STEPS_DIVERGE)
    if not 2.0 * (sched.alpha - sched.gamma) > 1:
        violations.append(GAIN_RATIO_SUMMABLE)
    return A2Verdict(ok=not violations, violations=tuple(violations))


def require_a2(sched: StepSchedule, force: bool = False) -> A2Verdict:
    verdict = validate_a2(sched)
    if verdict.ok:
        return verdict
    if force:
        logger.warning("Running with a schedule that violates: %s", "; ".join(verdict.violations))
        return verdict
    raise ScheduleValidationError(verdict.violations)


def gain_ratio_partial_sums(sched: StepSchedule, n_terms: int) -> np.ndarray:
    a, delta = step_size_arrays(sched, n_terms)
    return np.cumsum((a / delta) ** 2)


def gain_ratio_bound(sched: StepSchedule) -> float:
    """
    Upper bound on sum_n (a_n/delta_n)^2 for a schedule that passes validate_a2.

    (a_n/delta_n)^2 <= (a_scale/c)^2 (n+1)^(-s) with s = 2(alpha-gamma), and
    sum_{k>=1} k^(-s) <= 1 + 1/(s-1).
    """
    exponent = 2.0 * (sched.alpha - sched.gamma)
    if not exponent > 1:
        raise ScheduleValidationError([GAIN_RATIO_SUMMABLE])
    return (sched.a_scale / sched.c) ** 2 * (1.0 + 1.0 / (exponent - 1.0))
