from __future__ import annotations

from functools import lru_cache

from fastapi import Depends

from twistrack.config import Settings, get_settings
from twistrack.services import ClassifierService, SpecialService, TorusService


@lru_cache(maxsize=1)
def get_classifier_service_cached() -> ClassifierService:
    return ClassifierService(workers=get_settings().workers)


def get_classifier_service(settings: Settings = Depends(get_settings)) -> ClassifierService:
    return get_classifier_service_cached()


@lru_cache(maxsize=1)
def get_special_service_cached() -> SpecialService:
    return SpecialService(get_settings())


def get_special_service(settings: Settings = Depends(get_settings)) -> SpecialService:
    return get_special_service_cached()


@lru_cache(maxsize=1)
def get_torus_service_cached() -> TorusService:
    return TorusService(get_settings())


def get_torus_service(settings: Settings = Depends(get_settings)) -> TorusService:
    return get_torus_service_cached()
