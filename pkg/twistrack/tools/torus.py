from fastapi import APIRouter, Depends, HTTPException

from twistrack.dependencies.services import get_torus_service
from twistrack.schemas.torus import TorusReport, TorusRequest
from twistrack.services import TorusService
from twistrack.services.exceptions import ServiceError

router = APIRouter()


@router.post("/report", response_model=TorusReport)
def torus_report(
    req: TorusRequest,
    service: TorusService = Depends(get_torus_service),
):
    try:
        return service.report(req)
    except ServiceError as exc:
        raise HTTPException(status_code=502, detail=str(exc)) from exc
