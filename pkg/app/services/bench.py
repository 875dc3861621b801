"""
Replicated benchmark runs: every algorithm of a plan against the same objective,
noise level and simulation budget, summarised by NMSE mean and sample std.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Optional, Sequence

import numpy as np

from app.core.logging import get_logger
from app.models import (
    Algorithm,
    AlgorithmSummary,
    ExperimentPlan,
    ExperimentResult,
    NmseRecord,
    ObjectiveKind,
    ONE_SIMULATION_ALGORITHMS,
    TWO_SIMULATION_ALGORITHMS,
)
from app.services.errors import ConfigurationError, UndefinedMetricError
from app.services.objectives import NoisyObjective, make_loss, nmse
from app.services.optimize import run
from app.services.schedule import require_a2

logger = get_logger(__name__)


@dataclass(frozen=True, slots=True)
class TablePreset:
    """
    Protocol of one benchmark table. `schedule` holds the gain constants that
    differ from the plan defaults for this table.
    """

    objective: ObjectiveKind
    algorithms: tuple[Algorithm, ...]
    budget: int
    schedule: Mapping[str, float] = field(default_factory=dict)

    def fields(self) -> dict[str, Any]:
        return {
            "algorithms": self.algorithms,
            "objective": self.objective,
            "budget": self.budget,
            **self.schedule,
        }


# One-sided estimates carry a J(theta)/delta_n term that only cancels over a whole
# cycle. Table 4 keeps a_n small and nearly flat so random directions stay in the
# basin of the quartic loss.
TABLE_PRESETS: dict[int, TablePreset] = {
    1: TablePreset(ObjectiveKind.QUADRATIC, TWO_SIMULATION_ALGORITHMS, 2000),
    2: TablePreset(ObjectiveKind.FOURTH_ORDER, TWO_SIMULATION_ALGORITHMS, 10000, {"c": 1.4}),
    3: TablePreset(ObjectiveKind.QUADRATIC, ONE_SIMULATION_ALGORITHMS, 20000, {"c": 1.4}),
    4: TablePreset(
        ObjectiveKind.FOURTH_ORDER,
        ONE_SIMULATION_ALGORITHMS,
        20000,
        {"a_scale": 0.25, "c": 0.08, "B": 80000.0},
    ),
}
TABLE_SIGMAS: tuple[float, ...] = (0.0, 0.01)


def table_plans(table: int, overrides: Optional[Mapping[str, Any]] = None) -> list[ExperimentPlan]:
    """One plan per noise level of a benchmark table; overrides replace plan fields."""
    if table not in TABLE_PRESETS:
        raise ConfigurationError(f"Unknown table {table}; expected one of {sorted(TABLE_PRESETS)}.")
    fields = TABLE_PRESETS[table].fields()
    fields.update({k: v for k, v in (overrides or {}).items() if v is not None and k != "sigma"})
    return [ExperimentPlan(**fields, sigma=sigma) for sigma in TABLE_SIGMAS]


def run_experiment(plan: ExperimentPlan, workers: Optional[int] = 1) -> ExperimentResult:
    """
    Run every (algorithm, replication) pair of the plan.

    Replication r uses seed base_seed + r for the noise of every algorithm and
    for the Bernoulli directions; cyclic sources start each replication at the
    first column. workers=1 runs inline, None uses every CPU.
    """
    theta_star = make_loss(plan.objective, plan.dimension).theta_star
    if np.array_equal(np.full(plan.dimension, plan.theta0_fill), theta_star):
        raise UndefinedMetricError("NMSE is undefined when theta0 equals theta*.")
    for algorithm in plan.algorithms:
        require_a2(plan.schedule_for(algorithm), force=plan.force)

    tasks = [(plan, algorithm, r) for algorithm in plan.algorithms for r in range(plan.replications)]
    worker_count = workers if workers is not None else (os.cpu_count() or 1)
    logger.info(
        "Running %d replications of %s on %s (sigma=%s, budget=%d, workers=%d)",
        plan.replications,
        ", ".join(a.value for a in plan.algorithms),
        plan.objective.value,
        plan.sigma,
        plan.budget,
        worker_count,
    )

    if worker_count <= 1 or len(tasks) <= 1:
        records = [_run_task(task) for task in tasks]
    else:
        chunksize = max(1, len(tasks) // (4 * worker_count))
        with ProcessPoolExecutor(max_workers=worker_count) as pool:
            records = list(pool.map(_run_task, tasks, chunksize=chunksize))

    order = {algorithm: i for i, algorithm in enumerate(plan.algorithms)}
    records.sort(key=lambda r: (order[r.algorithm], r.replication))
    result = ExperimentResult(
        plan=plan,
        records=tuple(records),
        summaries=summarize_records(records, plan.algorithms),
    )
    if result.diverged_count:
        logger.warning("%d of %d replications diverged", result.diverged_count, len(records))
    return result


def run_replication(plan: ExperimentPlan, algorithm: Algorithm, replication: int) -> NmseRecord:
    seed = plan.base_seed + replication
    config = plan.optimizer_config(algorithm, seed)
    loss = make_loss(plan.objective, plan.dimension)
    outcome = run(config, NoisyObjective(loss, noise_sigma=plan.sigma, seed=seed))

    value = math.nan
    diverged = outcome.diverged
    if not diverged:
        value = nmse(outcome.theta_end, config.initial_theta(), loss.theta_star)
        if not math.isfinite(value):
            diverged, value = True, math.nan

    logger.debug("%s replication %d: nmse=%s diverged=%s", algorithm.value, replication, value, diverged)
    return NmseRecord(
        algorithm=algorithm,
        objective=plan.objective,
        sigma=plan.sigma,
        budget=plan.budget,
        replication=replication,
        seed=seed,
        nmse=value,
        diverged=diverged,
    )


def _run_task(task: tuple[ExperimentPlan, Algorithm, int]) -> NmseRecord:
    return run_replication(*task)


def summarize_records(
    records: Iterable[NmseRecord], algorithms: Optional[Sequence[Algorithm]] = None
) -> tuple[AlgorithmSummary, ...]:
    """
    Per-algorithm mean and sample standard deviation of the non-diverged NMSE values.
    Algorithms default to the order in which they first appear in the records.
    """
    records = list(records)
    if algorithms is None:
        algorithms = list(dict.fromkeys(r.algorithm for r in records))

    summaries = []
    for algorithm in algorithms:
        own = [r for r in records if r.algorithm is algorithm]
        values = np.array([r.nmse for r in own if not r.diverged], dtype=float)
        if values.size == 0:
            mean, std = math.nan, math.nan
        elif values.size == 1:
            mean, std = float(values[0]), 0.0
        else:
            mean, std = float(values.mean()), float(values.std(ddof=1))
        summaries.append(
            AlgorithmSummary(
                algorithm=algorithm,
                mean=mean,
                std=std,
                replications=int(values.size),
                diverged=len(own) - int(values.size),
                single_sample=values.size == 1,
            )
        )
    return tuple(summaries)
