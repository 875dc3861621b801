from __future__ import annotations

from fastapi import APIRouter, Depends, HTTPException, status
from pydantic import ValidationError

from app.api.schemas import RunRequest, RunResponse
from app.core.config import Settings, get_settings
from app.core.logging import get_logger
from app.services.errors import RdkwError
from app.services.runs import run_single

logger = get_logger(__name__)

router = APIRouter(prefix="/runs", tags=["runs"])


@router.post("", response_model=RunResponse)
def create_run(
    payload: RunRequest,
    settings: Settings = Depends(get_settings),
) -> RunResponse:
    """
    Run the optimiser once and report where it ended.

    - **algorithm**: one of DSPKW-2C, RDKW-2H, RDKW-2R, DSPKW-1C, RDKW-1H, RDKW-1R
    - **budget**: number of objective evaluations
    - **force**: run even when the step-size schedule fails the gain conditions
    """
    if payload.budget > settings.API_MAX_BUDGET:
        logger.warning("Run refused: budget %d over limit %d", payload.budget, settings.API_MAX_BUDGET)
        raise HTTPException(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            detail=f"budget {payload.budget} exceeds the limit of {settings.API_MAX_BUDGET}",
        )
    try:
        report = run_single(payload.to_plan(), payload.algorithm)
    except ValidationError as e:
        raise HTTPException(
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            detail=[{"loc": err["loc"], "msg": err["msg"]} for err in e.errors()],
        ) from e
    except RdkwError as e:
        logger.warning("Run refused: %s", e)
        raise HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(e)) from e

    logger.info(
        "Run finished: %s iterations=%d nmse=%.3e diverged=%s",
        payload.algorithm.value,
        report.outcome.iterations,
        report.nmse,
        report.outcome.diverged,
    )
    return RunResponse.from_report(report)
