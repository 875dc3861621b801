"""Domain models for the perturbation-based optimiser and its benchmark."""

from app.models.models import (
    A2Verdict,
    Algorithm,
    AlgorithmSummary,
    DEFAULT_STABILITY_FRACTION,
    EstimatorKind,
    ExperimentPlan,
    ExperimentResult,
    NmseRecord,
    ObjectiveKind,
    ONE_SIMULATION_ALGORITHMS,
    OptimizerConfig,
    PerturbationKind,
    StepSchedule,
    TWO_SIMULATION_ALGORITHMS,
    VerificationReport,
)

__all__ = [
    "A2Verdict",
    "Algorithm",
    "AlgorithmSummary",
    "DEFAULT_STABILITY_FRACTION",
    "EstimatorKind",
    "ExperimentPlan",
    "ExperimentResult",
    "NmseRecord",
    "ObjectiveKind",
    "ONE_SIMULATION_ALGORITHMS",
    "OptimizerConfig",
    "PerturbationKind",
    "StepSchedule",
    "TWO_SIMULATION_ALGORITHMS",
    "VerificationReport",
]
