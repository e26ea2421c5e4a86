from fastapi import APIRouter, Depends, HTTPException

from twistrack.dependencies.services import get_special_service
from twistrack.schemas.verify import (
    H2Report,
    H2Request,
    Psl43Report,
    UnipotentReport,
    UnipotentRequest,
)
from twistrack.services import SpecialService
from twistrack.services.exceptions import ServiceError

router = APIRouter()


@router.post("/h2", response_model=H2Report)
def verify_h2(
    req: H2Request,
    service: SpecialService = Depends(get_special_service),
):
    try:
        return service.h2(req.q)
    except ServiceError as exc:
        raise HTTPException(status_code=502, detail=str(exc)) from exc


@router.get("/psl43", response_model=Psl43Report)
def verify_psl43(service: SpecialService = Depends(get_special_service)):
    try:
        return service.psl43()
    except ServiceError as exc:
        raise HTTPException(status_code=502, detail=str(exc)) from exc


@router.post("/unipotent", response_model=UnipotentReport)
def verify_unipotent(
    req: UnipotentRequest,
    service: SpecialService = Depends(get_special_service),
):
    try:
        return service.unipotent(req.n, req.q, req.eta_square)
    except ServiceError as exc:
        raise HTTPException(status_code=502, detail=str(exc)) from exc
