from __future__ import annotations

from fastapi import APIRouter, HTTPException, Path, Query, status

from app.api.schemas import VerificationResponse
from app.core.logging import get_logger
from app.models import PerturbationKind
from app.services.errors import RdkwError
from app.services.perturb import build_cycle, verify_cycle

logger = get_logger(__name__)

router = APIRouter(prefix="/perturbations", tags=["perturbations"])

VERIFY_TOLERANCE = 1e-10


@router.get("/{source}/verify", response_model=VerificationResponse)
def verify_perturbations(
    source: PerturbationKind = Path(..., description="circulant or hadamard"),
    p: int = Query(10, ge=1, le=1024, description="Parameter dimension"),
) -> VerificationResponse:
    """
    Build the deterministic cycle for dimension p and report how far it is from
    sum d d^T = P I and sum d = 0.
    """
    try:
        cycle = build_cycle(source, p)
    except RdkwError as e:
        logger.warning("Verification refused: %s", e)
        raise HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(e)) from e

    report = verify_cycle(cycle)
    logger.info(
        "Verified %s cycle: p=%d P=%d residuals=(%.3e, %.3e)",
        source.value,
        p,
        report.cycle_length,
        report.p1_residual,
        report.p2_residual,
    )
    return VerificationResponse.from_report(report, VERIFY_TOLERANCE)
