"""Text tables and CSV rows for benchmark results."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from app.models import Algorithm, AlgorithmSummary, ExperimentResult, NmseRecord, ObjectiveKind

CSV_COLUMNS: tuple[str, ...] = (
    "algorithm",
    "objective",
    "sigma",
    "budget",
    "replication",
    "seed",
    "nmse",
    "diverged",
)
TRAJECTORY_COLUMNS: tuple[str, ...] = ("iteration", "squared_error")


@dataclass(frozen=True)
class Summary:
    text_rows: tuple[str, ...]
    csv_rows: tuple[tuple[str, ...], ...]

    @property
    def text(self) -> str:
        return "\n".join(self.text_rows)


def format_float(value: float) -> str:
    """17 significant digits, enough for float(text) to give back the same double."""
    return format(value, ".17g")


def format_summary_row(summary: AlgorithmSummary) -> str:
    row = f"{summary.algorithm.value:<10}{summary.mean:.3e} ± {summary.std:.3e}"
    if summary.single_sample:
        row += "  (single sample)"
    if summary.diverged:
        row += f"  ({summary.diverged} diverged)"
    return row


def table_header(result: ExperimentResult) -> str:
    plan = result.plan
    return (
        f"{plan.objective.value}  sigma={plan.sigma:g}  budget={plan.budget}  "
        f"replications={plan.replications}"
    )


def summarize(result: ExperimentResult) -> Summary:
    text_rows = [table_header(result)]
    text_rows.extend(format_summary_row(s) for s in result.summaries)
    return Summary(text_rows=tuple(text_rows), csv_rows=tuple(records_to_rows(result.records)))


def record_to_row(record: NmseRecord) -> tuple[str, ...]:
    return (
        record.algorithm.value,
        record.objective.value,
        repr(float(record.sigma)),
        str(record.budget),
        str(record.replication),
        str(record.seed),
        format_float(record.nmse),
        "true" if record.diverged else "false",
    )


def records_to_rows(records: Iterable[NmseRecord]) -> list[tuple[str, ...]]:
    """Header row followed by one row per record."""
    return [CSV_COLUMNS, *(record_to_row(r) for r in records)]


def rows_to_records(rows: Sequence[Sequence[str]]) -> list[NmseRecord]:
    """
    Inverse of records_to_rows. Raises ValueError on a wrong header or a malformed row.
    """
    if not rows:
        return []
    if tuple(rows[0]) != CSV_COLUMNS:
        raise ValueError(f"Unexpected CSV header {list(rows[0])!r}")
    records = []
    for line, row in enumerate(rows[1:], start=2):
        if len(row) != len(CSV_COLUMNS):
            raise ValueError(f"Row {line} has {len(row)} fields, expected {len(CSV_COLUMNS)}")
        algorithm, objective, sigma, budget, replication, seed, value, diverged = row
        if diverged not in ("true", "false"):
            raise ValueError(f"Row {line}: diverged must be true or false, got {diverged!r}")
        try:
            records.append(
                NmseRecord(
                    algorithm=Algorithm.parse(algorithm),
                    objective=ObjectiveKind(objective),
                    sigma=float(sigma),
                    budget=int(budget),
                    replication=int(replication),
                    seed=int(seed),
                    nmse=float(value),
                    diverged=diverged == "true",
                )
            )
        except ValueError as exc:
            raise ValueError(f"Row {line}: {exc}") from exc
    return records


def trajectory_rows(
    trajectory: Sequence[np.ndarray], theta_star: Optional[np.ndarray]
) -> list[tuple[str, ...]]:
    """(n, ||theta_n - theta*||^2) per recorded iterate; NaN errors without a known optimum."""
    rows: list[tuple[str, ...]] = [TRAJECTORY_COLUMNS]
    for n, theta in enumerate(trajectory):
        error = math.nan if theta_star is None else float(np.sum((theta - theta_star) ** 2))
        rows.append((str(n), format_float(error)))
    return rows
