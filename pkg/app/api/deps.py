from __future__ import annotations

from app.adapters.datasources.csv_store import CsvStore
from app.core.config import Settings, get_settings
from app.repositories.file_csv import FileRecordRepository
from app.services.experiments import ExperimentService


def _record_repository_factory(settings: Settings):
    def repository_for(experiment_id: str) -> FileRecordRepository:
        return FileRecordRepository(csv_store=CsvStore(path=settings.RESULTS_DIR / f"{experiment_id}.csv"))
    return repository_for


def get_experiment_service() -> ExperimentService:
    """
    ExperimentService dependency; results are stored under RESULTS_DIR.
    """
    settings = get_settings()
    return ExperimentService(
        repository_for=_record_repository_factory(settings),
        max_replications=settings.API_MAX_REPLICATIONS,
        max_budget=settings.API_MAX_BUDGET,
        workers=settings.MAX_WORKERS,
    )
