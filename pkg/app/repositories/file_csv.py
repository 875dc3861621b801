from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from app.adapters.datasources.csv_store import CsvCorruptedError, CsvStore
from app.models import NmseRecord
from app.services.reporting import format_float, records_to_rows, rows_to_records, trajectory_rows


class FileRecordRepository:
    """
    CSV-backed repository for NMSE records.
    """
    def __init__(self, csv_store: CsvStore):
        self._csv_store = csv_store

    def exists(self) -> bool:
        return self._csv_store.exists()

    def list_all(self) -> Sequence[NmseRecord]:
        rows = self._csv_store.read_rows()
        try:
            return rows_to_records(rows)
        except ValueError as e:
            raise CsvCorruptedError(f"Invalid results file {self._csv_store.path}: {e}") from e

    def save_all(self, records: Sequence[NmseRecord]) -> None:
        self._csv_store.write_rows(records_to_rows(records))


class FileCycleRepository:
    """
    Perturbation matrix as CSV: line k holds direction k (column k of the p x P matrix).
    """
    def __init__(self, csv_store: CsvStore):
        self._csv_store = csv_store

    def save(self, columns: np.ndarray) -> None:
        self._csv_store.write_rows(
            [format_float(float(x)) for x in column] for column in np.asarray(columns).T
        )

    def load(self) -> np.ndarray:
        rows = self._csv_store.read_rows()
        if not rows:
            raise CsvCorruptedError(f"No perturbation directions in {self._csv_store.path}")
        try:
            directions = np.array([[float(x) for x in row] for row in rows], dtype=float)
        except ValueError as e:
            raise CsvCorruptedError(f"Invalid perturbation file {self._csv_store.path}: {e}") from e
        return directions.T


class FileTrajectoryRepository:
    def __init__(self, csv_store: CsvStore):
        self._csv_store = csv_store

    def save(self, trajectory: Sequence[np.ndarray], theta_star: Optional[np.ndarray]) -> None:
        self._csv_store.write_rows(trajectory_rows(trajectory, theta_star))
