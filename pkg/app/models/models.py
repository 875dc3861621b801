from __future__ import annotations

from enum import Enum
from typing import Any, Optional

from typing_extensions import Self

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class EstimatorKind(str, Enum):
    TWO_SIDED = "two-sided"
    ONE_SIDED = "one-sided"

    @property
    def simulations_per_iteration(self) -> int:
        return 2 if self is EstimatorKind.TWO_SIDED else 1


class PerturbationKind(str, Enum):
    CIRCULANT = "circulant"
    HADAMARD = "hadamard"
    BERNOULLI = "bernoulli"

    @property
    def is_deterministic(self) -> bool:
        return self is not PerturbationKind.BERNOULLI


class ObjectiveKind(str, Enum):
    QUADRATIC = "quadratic"
    FOURTH_ORDER = "fourth-order"


class Algorithm(str, Enum):
    """Benchmark acronyms; the digit is the number of simulations per iteration."""
    DSPKW_2C = "DSPKW-2C"
    RDKW_2H = "RDKW-2H"
    RDKW_2R = "RDKW-2R"
    DSPKW_1C = "DSPKW-1C"
    RDKW_1H = "RDKW-1H"
    RDKW_1R = "RDKW-1R"

    @property
    def estimator_kind(self) -> EstimatorKind:
        return _ALGORITHM_TABLE[self][0]

    @property
    def perturbation_kind(self) -> PerturbationKind:
        return _ALGORITHM_TABLE[self][1]

    @classmethod
    def parse(cls, name: str) -> Algorithm:
        """Case-insensitive lookup, so `dspkw-2c` and `DSPKW-2C` are the same algorithm."""
        for algorithm in cls:
            if algorithm.value.lower() == name.strip().lower():
                return algorithm
        raise ValueError(f"Unknown algorithm {name!r}; expected one of {[a.value for a in cls]}")


_ALGORITHM_TABLE: dict[Algorithm, tuple[EstimatorKind, PerturbationKind]] = {
    Algorithm.DSPKW_2C: (EstimatorKind.TWO_SIDED, PerturbationKind.CIRCULANT),
    Algorithm.RDKW_2H: (EstimatorKind.TWO_SIDED, PerturbationKind.HADAMARD),
    Algorithm.RDKW_2R: (EstimatorKind.TWO_SIDED, PerturbationKind.BERNOULLI),
    Algorithm.DSPKW_1C: (EstimatorKind.ONE_SIDED, PerturbationKind.CIRCULANT),
    Algorithm.RDKW_1H: (EstimatorKind.ONE_SIDED, PerturbationKind.HADAMARD),
    Algorithm.RDKW_1R: (EstimatorKind.ONE_SIDED, PerturbationKind.BERNOULLI),
}

TWO_SIMULATION_ALGORITHMS = (Algorithm.DSPKW_2C, Algorithm.RDKW_2H, Algorithm.RDKW_2R)
ONE_SIMULATION_ALGORITHMS = (Algorithm.DSPKW_1C, Algorithm.RDKW_1H, Algorithm.RDKW_1R)

DEFAULT_STABILITY_FRACTION = 0.1


class StepSchedule(BaseModel):
    """Power-law gains a_n = a_scale/(n+B+1)^alpha and delta_n = c/(n+1)^gamma."""
    model_config = ConfigDict(frozen=True)

    a_scale: float = Field(default=1.0, gt=0, description="Numerator of the step size a_n")
    alpha: float = Field(default=0.602, description="Decay exponent of a_n")
    B: float = Field(default=0.0, ge=0, description="Stability offset of a_n")
    c: float = Field(default=0.1, gt=0, description="Numerator of the sensitivity delta_n")
    gamma: float = Field(default=0.101, description="Decay exponent of delta_n")


class A2Verdict(BaseModel):
    model_config = ConfigDict(frozen=True)

    ok: bool = Field(..., description="True when every step-size condition holds")
    violations: tuple[str, ...] = Field(default=(), description="Names of violated conditions")


class VerificationReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    source: Optional[PerturbationKind] = Field(default=None, description="Construction that produced the cycle")
    dimension: int = Field(..., ge=1)
    cycle_length: int = Field(..., ge=1)
    p1_residual: float = Field(..., description="max |sum d d^T - P I|")
    p2_residual: float = Field(..., description="max |sum d|")
    orthogonality_residual: float = Field(..., description="max |X X^T - P I| with the ones row stacked over Y")
    max_col_norm: float = Field(..., description="max_n ||d_n||")
    max_outer_norm: float = Field(..., description="max_n ||d_n d_n^T - I|| (spectral)")

    def passed(self, tolerance: float = 1e-10) -> bool:
        return self.p1_residual <= tolerance and self.p2_residual <= tolerance


class OptimizerConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    dimension: int = Field(..., ge=1)
    estimator_kind: EstimatorKind = Field(default=EstimatorKind.TWO_SIDED)
    perturbation: PerturbationKind = Field(default=PerturbationKind.CIRCULANT)
    perturbation_seed: int = Field(default=0, ge=0, description="Seed of the Bernoulli direction stream")
    schedule: StepSchedule = Field(default_factory=StepSchedule)
    simulation_budget: int = Field(..., ge=1, description="Total number of objective evaluations")
    theta0: Optional[tuple[float, ...]] = Field(default=None, description="Initial point, all-ones when omitted")
    record_trajectory: bool = Field(default=False)
    force: bool = Field(default=False, description="Run even when the schedule fails the step-size conditions")

    @model_validator(mode="before")
    @classmethod
    def default_schedule(cls, data: Any) -> Any:
        """Without an explicit schedule, B is 10% of the iterations the budget allows."""
        if not isinstance(data, dict) or data.get("schedule") is not None:
            return data
        try:
            kind = EstimatorKind(data.get("estimator_kind", EstimatorKind.TWO_SIDED))
            budget = int(data["simulation_budget"])
        except (KeyError, TypeError, ValueError):
            return data
        iterations = max(budget, 0) // kind.simulations_per_iteration
        return {**data, "schedule": StepSchedule(B=DEFAULT_STABILITY_FRACTION * iterations)}

    @model_validator(mode="after")
    def validate_budget_and_start(self) -> Self:
        needed = self.estimator_kind.simulations_per_iteration
        if self.simulation_budget < needed:
            raise ValueError(
                f"simulation_budget must be >= {needed} for a {self.estimator_kind.value} estimator"
            )
        if self.theta0 is not None and len(self.theta0) != self.dimension:
            raise ValueError(f"theta0 has {len(self.theta0)} entries, expected {self.dimension}")
        return self

    @property
    def n_iterations(self) -> int:
        return self.simulation_budget // self.estimator_kind.simulations_per_iteration

    def initial_theta(self) -> np.ndarray:
        if self.theta0 is None:
            return np.ones(self.dimension)
        return np.asarray(self.theta0, dtype=float)


class NmseRecord(BaseModel):
    """One replication of one algorithm; also one row of the results CSV."""
    model_config = ConfigDict(frozen=True)

    algorithm: Algorithm
    objective: ObjectiveKind
    sigma: float = Field(..., ge=0)
    budget: int = Field(..., ge=1)
    replication: int = Field(..., ge=0)
    seed: int = Field(..., ge=0)
    nmse: float = Field(..., description="NaN when the replication diverged")
    diverged: bool = Field(default=False)


class AlgorithmSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    algorithm: Algorithm
    mean: float
    std: float
    replications: int = Field(..., ge=0, description="Replications that entered the statistics")
    diverged: int = Field(default=0, ge=0)
    single_sample: bool = Field(default=False)


class ExperimentPlan(BaseModel):
    model_config = ConfigDict(frozen=True)

    algorithms: tuple[Algorithm, ...] = Field(..., min_length=1)
    objective: ObjectiveKind
    sigma: float = Field(default=0.0, ge=0)
    budget: int = Field(..., ge=1, description="Simulations per replication")
    replications: int = Field(default=100, ge=1)
    base_seed: int = Field(default=0, ge=0)
    dimension: int = Field(default=10, ge=1)
    a_scale: float = Field(default=1.0, gt=0)
    alpha: float = Field(default=0.602)
    gamma: float = Field(default=0.101)
    c: float = Field(default=0.1, gt=0)
    B: Optional[float] = Field(default=None, ge=0, description="Stability offset, 10% of the iterations when omitted")
    theta0_fill: float = Field(default=1.0)
    force: bool = Field(default=False)

    @model_validator(mode="after")
    def validate_budget(self) -> Self:
        for algorithm in self.algorithms:
            if self.budget < algorithm.estimator_kind.simulations_per_iteration:
                raise ValueError(f"budget {self.budget} is too small for {algorithm.value}")
        return self

    def iterations_for(self, algorithm: Algorithm) -> int:
        return self.budget // algorithm.estimator_kind.simulations_per_iteration

    def schedule_for(self, algorithm: Algorithm) -> StepSchedule:
        offset = self.B if self.B is not None else DEFAULT_STABILITY_FRACTION * self.iterations_for(algorithm)
        return StepSchedule(a_scale=self.a_scale, alpha=self.alpha, B=offset, c=self.c, gamma=self.gamma)

    def optimizer_config(self, algorithm: Algorithm, seed: int) -> OptimizerConfig:
        return OptimizerConfig(
            dimension=self.dimension,
            estimator_kind=algorithm.estimator_kind,
            perturbation=algorithm.perturbation_kind,
            perturbation_seed=seed,
            schedule=self.schedule_for(algorithm),
            simulation_budget=self.budget,
            theta0=(self.theta0_fill,) * self.dimension,
            force=self.force,
        )


class ExperimentResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    plan: ExperimentPlan
    records: tuple[NmseRecord, ...]
    summaries: tuple[AlgorithmSummary, ...]

    @property
    def diverged_count(self) -> int:
        return sum(1 for record in self.records if record.diverged)

    @property
    def divergence_dominated(self) -> bool:
        return 2 * self.diverged_count > len(self.records)

    def values_for(self, algorithm: Algorithm) -> list[float]:
        return [r.nmse for r in self.records if r.algorithm is algorithm and not r.diverged]

    def summary_for(self, algorithm: Algorithm) -> AlgorithmSummary:
        for summary in self.summaries:
            if summary.algorithm is algorithm:
                return summary
        raise KeyError(algorithm)
