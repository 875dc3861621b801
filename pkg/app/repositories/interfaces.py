from __future__ import annotations

from typing import Optional, Protocol, Sequence, runtime_checkable

import numpy as np

from app.models import NmseRecord


@runtime_checkable
class RecordRepository(Protocol):
    """
    Abstraction over persisted NMSE records of one experiment.
    """
    def exists(self) -> bool: ...
    def list_all(self) -> Sequence[NmseRecord]: ...
    def save_all(self, records: Sequence[NmseRecord]) -> None: ...


@runtime_checkable
class CycleRepository(Protocol):
    """
    Abstraction over a dumped perturbation matrix, one direction per row of the file.
    """
    def save(self, columns: np.ndarray) -> None: ...
    def load(self) -> np.ndarray: ...


@runtime_checkable
class TrajectoryRepository(Protocol):
    def save(self, trajectory: Sequence[np.ndarray], theta_star: Optional[np.ndarray]) -> None: ...
