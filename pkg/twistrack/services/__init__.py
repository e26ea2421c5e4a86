"""Lazy exports of the twistrack services.

Services are imported lazily so that ``twistrack.services.exceptions`` can be
used by the algebra layer without pulling in the service implementations.
"""

from __future__ import annotations

from importlib import import_module
from typing import TYPE_CHECKING, Any

__all__ = [
    "ClassifierService",
    "OracleService",
    "SpecialService",
    "TorusService",
]

_SERVICE_MODULES = {
    "ClassifierService": "classifier",
    "OracleService": "oracle",
    "SpecialService": "special",
    "TorusService": "torus",
}


def __getattr__(name: str) -> Any:
    if name not in _SERVICE_MODULES:
        raise AttributeError(f"module {__name__!r} has no attribute {name!r}")

    module = import_module(f".{_SERVICE_MODULES[name]}", __name__)
    attr = getattr(module, name)
    globals()[name] = attr
    return attr


if TYPE_CHECKING:  # pragma: no cover - import for static analysis only
    from .classifier import ClassifierService as ClassifierService
    from .oracle import OracleService as OracleService
    from .special import SpecialService as SpecialService
    from .torus import TorusService as TorusService
