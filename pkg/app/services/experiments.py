from __future__ import annotations

import re
import uuid
from dataclasses import dataclass
from typing import Callable, Optional

from app.core.logging import get_logger
from app.models import ExperimentPlan, ExperimentResult
from app.repositories.interfaces import RecordRepository
from app.services.bench import run_experiment, summarize_records
from app.services.errors import ExperimentLimitError, ExperimentNotFoundError

logger = get_logger(__name__)

_EXPERIMENT_ID = re.compile(r"^[0-9a-f]{32}$")


@dataclass(frozen=True, slots=True)
class StoredExperiment:
    experiment_id: str
    result: ExperimentResult


@dataclass(frozen=True, slots=True)
class ExperimentService:
    """
    Runs benchmark plans on behalf of remote callers and archives their records.
    """
    repository_for: Callable[[str], RecordRepository]
    max_replications: int
    max_budget: int
    workers: Optional[int] = 1

    def run_and_store(self, plan: ExperimentPlan) -> StoredExperiment:
        if plan.replications > self.max_replications:
            raise ExperimentLimitError(
                f"replications {plan.replications} exceeds the limit of {self.max_replications}"
            )
        if plan.budget > self.max_budget:
            raise ExperimentLimitError(f"budget {plan.budget} exceeds the limit of {self.max_budget}")

        result = run_experiment(plan, workers=self.workers)
        experiment_id = uuid.uuid4().hex
        self.repository_for(experiment_id).save_all(result.records)
        logger.info("Stored %d records as experiment %s", len(result.records), experiment_id)
        return StoredExperiment(experiment_id=experiment_id, result=result)

    def load(self, experiment_id: str) -> StoredExperiment:
        """
        Rebuilds statistics from the stored records. The plan is reconstructed from
        the records, so only its algorithm, objective, sigma and budget fields are meaningful.
        """
        if not _EXPERIMENT_ID.match(experiment_id):
            raise ExperimentNotFoundError(experiment_id)
        repository = self.repository_for(experiment_id)
        if not repository.exists():
            raise ExperimentNotFoundError(experiment_id)

        records = tuple(repository.list_all())
        if not records:
            raise ExperimentNotFoundError(experiment_id)
        algorithms = tuple(dict.fromkeys(r.algorithm for r in records))
        first = records[0]
        plan = ExperimentPlan(
            algorithms=algorithms,
            objective=first.objective,
            sigma=first.sigma,
            budget=first.budget,
            replications=max(r.replication for r in records) + 1,
            base_seed=min(r.seed - r.replication for r in records),
            force=True,
        )
        return StoredExperiment(
            experiment_id=experiment_id,
            result=ExperimentResult(
                plan=plan, records=records, summaries=summarize_records(records, algorithms)
            ),
        )
