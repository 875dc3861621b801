"""Single optimiser runs described by the same fields as a benchmark plan."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from app.core.logging import get_logger
from app.models import Algorithm, ExperimentPlan
from app.services.objectives import NoisyObjective, make_loss, nmse
from app.services.optimize import RunOutcome, run
from app.services.errors import UndefinedMetricError

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class RunReport:
    algorithm: Algorithm
    outcome: RunOutcome
    theta0: np.ndarray
    theta_star: np.ndarray
    loss: float
    nmse: float


def run_single(plan: ExperimentPlan, algorithm: Algorithm, record_trajectory: bool = False) -> RunReport:
    """
    Replication 0 of the plan for one algorithm, so the result matches the first
    row that run_experiment would produce for it.
    """
    seed = plan.base_seed
    config = plan.optimizer_config(algorithm, seed).model_copy(
        update={"record_trajectory": record_trajectory}
    )
    loss = make_loss(plan.objective, plan.dimension)
    theta0 = config.initial_theta()
    if np.array_equal(theta0, loss.theta_star):
        raise UndefinedMetricError("NMSE is undefined when theta0 equals theta*.")

    logger.info(
        "Single run of %s on %s (sigma=%s, budget=%d)",
        algorithm.value,
        plan.objective.value,
        plan.sigma,
        plan.budget,
    )
    outcome = run(config, NoisyObjective(loss, noise_sigma=plan.sigma, seed=seed))
    return RunReport(
        algorithm=algorithm,
        outcome=outcome,
        theta0=theta0,
        theta_star=loss.theta_star,
        loss=loss.value(outcome.theta_end),
        nmse=nmse(outcome.theta_end, theta0, loss.theta_star),
    )
