from __future__ import annotations

import logging

from twistrack.algebra.ffield import field_of_order
from twistrack.algebra.torus import torus_model, torus_realize, two_orbits_criterion, zeta_criterion
from twistrack.algebra.weyl import PartitionSignature
from twistrack.config import Settings, get_settings
from twistrack.schemas.torus import TorusReport, TorusRequest
from twistrack.services.exceptions import ServiceError

logger = logging.getLogger(__name__)


class TorusService:
    def __init__(self, settings: Settings | None = None) -> None:
        self._settings = settings or get_settings()

    def report(self, request: TorusRequest) -> TorusReport:
        logger.debug("Torus report for n=%d q=%d lambda=%s eps=%s", request.n, request.q, request.lam, request.eps)
        try:
            f = field_of_order(request.q)
            signature = PartitionSignature(request.n, tuple(request.lam), tuple(request.eps))
            model = torus_model(signature, f)
            torus = model.torus[0].canonical()
            image = model.image[0].canonical()
            witness = model.max_order_witness()
            report = TorusReport(
                n=request.n,
                q=request.q,
                lam=request.lam,
                eps=request.eps,
                torus=str(torus),
                torus_order=torus.order,
                k_subgroup=str(model.k_subgroup[0].canonical()),
                gamma_image=str(image),
                gamma_image_order=image.order,
                max_order=witness.order,
                zeta=zeta_criterion(signature, f) is not None,
                two_orbits=two_orbits_criterion(signature, f) is not None,
            )
            if request.realize:
                realized = torus_realize(signature, f, "SL", cap=self._settings.orbit_cap)
                report.realized_order = realized.order
                report.realized_exponent = realized.exponent
                report.theta_stable = realized.is_theta_stable()
            return report
        except ServiceError:
            raise
        except Exception as exc:
            logger.exception("Unexpected error while building a torus report")
            raise ServiceError("Failed to build torus report", cause=exc)
