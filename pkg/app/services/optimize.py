"""
Random-direction Kiefer-Wolfowitz iteration

    theta_{n+1} = theta_n - a_n g_n

with g_n the two- or one-sided estimate along the n-th perturbation direction.
The loop is unconstrained and stops once the simulation budget is spent.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from app.core.logging import get_logger
from app.models import EstimatorKind, OptimizerConfig
from app.services import perturb
from app.services.errors import BudgetExhaustedError, ConfigurationError, EstimationError
from app.services.estimate import estimate_gradient
from app.services.objectives import NoisyObjective
from app.services.schedule import require_a2, step_size_arrays

logger = get_logger(__name__)


@dataclass(eq=False)
class OptimizerState:
    theta: np.ndarray
    budget: int
    iteration: int = 0
    simulations_used: int = 0
    diverged: bool = False
    trajectory: Optional[list[np.ndarray]] = None

    @classmethod
    def initial(cls, config: OptimizerConfig) -> OptimizerState:
        theta = config.initial_theta()
        trajectory = [theta.copy()] if config.record_trajectory else None
        return cls(theta=theta, budget=config.simulation_budget, trajectory=trajectory)


@dataclass(frozen=True, eq=False)
class RunOutcome:
    theta_end: np.ndarray
    iterations: int
    simulations_used: int
    objective_evaluations: int
    diverged: bool
    trajectory: Optional[tuple[np.ndarray, ...]] = field(default=None, repr=False)


def build_direction_source(config: OptimizerConfig) -> perturb.DirectionSource:
    return perturb.build_direction_source(
        config.perturbation, config.dimension, seed=config.perturbation_seed
    )


def single_step(
    state: OptimizerState,
    d: np.ndarray,
    a: float,
    delta: float,
    objective: NoisyObjective,
    kind: EstimatorKind,
) -> OptimizerState:
    """
    One update of theta along direction d. The state is updated in place and returned.

    A non-finite measurement or iterate marks the state diverged and leaves
    theta at its last finite value. The aborted step still counts as an
    iteration and is charged its simulations, so simulations_used is always
    the per-iteration cost times iteration.
    """
    cost = kind.simulations_per_iteration
    if state.simulations_used + cost > state.budget:
        raise BudgetExhaustedError(state.simulations_used, cost, state.budget)

    theta = state.theta
    y_plus = objective.evaluate(theta + delta * d)
    y_minus = objective.evaluate(theta - delta * d) if kind is EstimatorKind.TWO_SIDED else None
    state.simulations_used += cost
    state.iteration += 1

    try:
        updated: Optional[np.ndarray] = theta - a * estimate_gradient(kind, y_plus, y_minus, d, delta)
    except EstimationError:
        updated = None
    if updated is None or not np.all(np.isfinite(updated)):
        state.diverged = True
    else:
        state.theta = updated
    if state.trajectory is not None:
        state.trajectory.append(state.theta.copy())
    return state


def run(config: OptimizerConfig, objective: NoisyObjective) -> RunOutcome:
    if objective.dimension != config.dimension:
        raise ConfigurationError(
            f"Objective has dimension {objective.dimension}, optimiser expects {config.dimension}."
        )
    require_a2(config.schedule, force=config.force)

    source = build_direction_source(config)
    n_iterations = config.n_iterations
    gains, sensitivities = step_size_arrays(config.schedule, n_iterations)
    state = OptimizerState.initial(config)
    evaluations_before = objective.evaluations

    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(n_iterations):
            single_step(
                state,
                source.next_direction(),
                float(gains[n]),
                float(sensitivities[n]),
                objective,
                config.estimator_kind,
            )
            if state.diverged:
                logger.warning(
                    "Run diverged at iteration %d (%s, %s)",
                    n,
                    config.estimator_kind.value,
                    config.perturbation.value,
                )
                break

    logger.debug(
        "Run finished: %d iterations, %d simulations", state.iteration, state.simulations_used
    )
    return RunOutcome(
        theta_end=state.theta,
        iterations=state.iteration,
        simulations_used=state.simulations_used,
        objective_evaluations=objective.evaluations - evaluations_before,
        diverged=state.diverged,
        trajectory=tuple(state.trajectory) if state.trajectory is not None else None,
    )
