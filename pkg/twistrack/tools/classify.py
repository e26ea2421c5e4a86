from fastapi import APIRouter, Depends, HTTPException

from twistrack.dependencies.services import get_classifier_service
from twistrack.schemas.classify import ClassDescriptor, SweepReport, SweepRequest, Verdict
from twistrack.services import ClassifierService
from twistrack.services.exceptions import ServiceError

router = APIRouter()


@router.post("", response_model=Verdict)
def classify(
    req: ClassDescriptor,
    evidence: bool = False,
    service: ClassifierService = Depends(get_classifier_service),
):
    try:
        return service.classify(req, with_evidence=evidence)
    except ServiceError as exc:
        raise HTTPException(status_code=502, detail=str(exc)) from exc


@router.post("/sweep", response_model=SweepReport)
def sweep(
    req: SweepRequest,
    service: ClassifierService = Depends(get_classifier_service),
):
    try:
        return service.sweep(req.n_max, req.q_max, compare_golden=req.compare_golden)
    except ServiceError as exc:
        raise HTTPException(status_code=502, detail=str(exc)) from exc
