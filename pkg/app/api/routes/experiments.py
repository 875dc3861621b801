from __future__ import annotations

from fastapi import APIRouter, Depends, HTTPException, status
from pydantic import ValidationError

from app.adapters.datasources.csv_store import CsvStoreError
from app.api.deps import get_experiment_service
from app.api.schemas import ExperimentRequest, ExperimentResponse
from app.core.logging import get_logger
from app.services.errors import ExperimentLimitError, ExperimentNotFoundError, RdkwError
from app.services.experiments import ExperimentService

logger = get_logger(__name__)

router = APIRouter(prefix="/experiments", tags=["experiments"])


@router.post("", response_model=ExperimentResponse, status_code=status.HTTP_201_CREATED)
def create_experiment(
    payload: ExperimentRequest,
    service: ExperimentService = Depends(get_experiment_service),
) -> ExperimentResponse:
    """
    Run a replicated benchmark and archive every replication as CSV.
    """
    logger.info(
        "Experiment request: algorithms=%s objective=%s replications=%d budget=%d",
        ",".join(a.value for a in payload.algorithms),
        payload.objective.value,
        payload.replications,
        payload.budget,
    )
    try:
        stored = service.run_and_store(payload.to_plan())
    except ValidationError as e:
        raise HTTPException(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            detail=[{"loc": err["loc"], "msg": err["msg"]} for err in e.errors()],
        ) from e
    except ExperimentLimitError as e:
        logger.warning("Experiment refused - over limit: %s", e)
        raise HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(e)) from e
    except RdkwError as e:
        logger.warning("Experiment refused: %s", e)
        raise HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(e)) from e
    except CsvStoreError as e:
        logger.error("Experiment results could not be stored: %s", e)
        raise HTTPException(status_code=status.HTTP_500_INTERNAL_SERVER_ERROR, detail=str(e)) from e

    return ExperimentResponse.from_stored(stored)


@router.get("/{experiment_id}", response_model=ExperimentResponse)
def get_experiment(
    experiment_id: str,
    service: ExperimentService = Depends(get_experiment_service),
) -> ExperimentResponse:
    try:
        stored = service.load(experiment_id)
    except ExperimentNotFoundError as e:
        logger.warning("Experiment not found: %s", experiment_id)
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail=str(e)) from e
    except CsvStoreError as e:
        logger.error("Stored experiment %s is unreadable: %s", experiment_id, e)
        raise HTTPException(status_code=status.HTTP_500_INTERNAL_SERVER_ERROR, detail=str(e)) from e
    return ExperimentResponse.from_stored(stored)
