from __future__ import annotations

import math
from typing import List, Optional

from pydantic import BaseModel, Field

from app.models import (
    Algorithm,
    AlgorithmSummary,
    ExperimentPlan,
    ObjectiveKind,
    PerturbationKind,
    VerificationReport,
)
from app.services.experiments import StoredExperiment
from app.services.reporting import format_summary_row
from app.services.runs import RunReport


def _finite_or_none(value: float) -> Optional[float]:
    return value if math.isfinite(value) else None


class ScheduleFields(BaseModel):
    objective: ObjectiveKind = Field(default=ObjectiveKind.QUADRATIC)
    sigma: float = Field(default=0.0, ge=0, description="Noise standard deviation")
    budget: int = Field(default=2000, ge=1, description="Simulations per run")
    dimension: int = Field(default=10, ge=1, le=1024)
    alpha: float = Field(default=0.602)
    gamma: float = Field(default=0.101)
    c: float = Field(default=0.1, gt=0)
    B: Optional[float] = Field(default=None, ge=0, description="Stability offset, 10% of the iterations when omitted")
    theta0_fill: float = Field(default=1.0)
    force: bool = Field(default=False, description="Run schedules that fail the gain conditions")


class RunRequest(ScheduleFields):
    algorithm: Algorithm = Field(default=Algorithm.DSPKW_2C)
    seed: int = Field(default=0, ge=0)

    def to_plan(self) -> ExperimentPlan:
        return ExperimentPlan(
            algorithms=(self.algorithm,),
            replications=1,
            base_seed=self.seed,
            **self.model_dump(exclude={"algorithm", "seed"}),
        )


class RunResponse(BaseModel):
    algorithm: Algorithm
    iterations: int
    simulations_used: int
    diverged: bool
    loss: Optional[float]
    nmse: Optional[float]
    theta_end: List[float]

    @classmethod
    def from_report(cls, report: RunReport) -> RunResponse:
        return cls(
            algorithm=report.algorithm,
            iterations=report.outcome.iterations,
            simulations_used=report.outcome.simulations_used,
            diverged=report.outcome.diverged,
            loss=_finite_or_none(report.loss),
            nmse=_finite_or_none(report.nmse),
            theta_end=[float(x) for x in report.outcome.theta_end],
        )


class ExperimentRequest(ScheduleFields):
    algorithms: List[Algorithm] = Field(..., min_length=1)
    replications: int = Field(default=10, ge=1)
    base_seed: int = Field(default=0, ge=0)

    def to_plan(self) -> ExperimentPlan:
        return ExperimentPlan(**self.model_dump())


class SummaryRow(BaseModel):
    algorithm: Algorithm
    mean: Optional[float] = Field(..., description="Mean NMSE, null when every replication diverged")
    std: Optional[float]
    replications: int
    diverged: int
    single_sample: bool
    text: str

    @classmethod
    def from_summary(cls, summary: AlgorithmSummary) -> SummaryRow:
        return cls(
            algorithm=summary.algorithm,
            mean=_finite_or_none(summary.mean),
            std=_finite_or_none(summary.std),
            replications=summary.replications,
            diverged=summary.diverged,
            single_sample=summary.single_sample,
            text=format_summary_row(summary),
        )


class ExperimentResponse(BaseModel):
    experiment_id: str
    objective: ObjectiveKind
    sigma: float
    budget: int
    records: int
    diverged: int
    summaries: List[SummaryRow]

    @classmethod
    def from_stored(cls, stored: StoredExperiment) -> ExperimentResponse:
        result = stored.result
        return cls(
            experiment_id=stored.experiment_id,
            objective=result.plan.objective,
            sigma=result.plan.sigma,
            budget=result.plan.budget,
            records=len(result.records),
            diverged=result.diverged_count,
            summaries=[SummaryRow.from_summary(s) for s in result.summaries],
        )


class VerificationResponse(BaseModel):
    source: PerturbationKind
    dimension: int
    cycle_length: int
    p1_residual: float
    p2_residual: float
    orthogonality_residual: float
    max_col_norm: float
    max_outer_norm: float
    passed: bool

    @classmethod
    def from_report(cls, report: VerificationReport, tolerance: float) -> VerificationResponse:
        return cls(**report.model_dump(), passed=report.passed(tolerance))
