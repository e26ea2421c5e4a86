import os
import sys

import pytest

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from twistrack.algebra.ffield import field_create
from twistrack.algebra.torus import (
    brute_force_counts,
    certify_realization,
    isomorphism_by_logs,
    k_subgroup,
    torus_group,
    torus_model,
    torus_realize,
    two_orbits_criterion,
    zeta_criterion,
)
from twistrack.algebra.weyl import PartitionSignature, conjugacy_reps
from twistrack.config import Settings
from twistrack.schemas.torus import TorusRequest
from twistrack.services.exceptions import ScaleTooLarge
from twistrack.services.torus import TorusService


@pytest.mark.parametrize(
    "n, q, eps, order",
    [
        (2, 5, (0,), 4),
        (2, 5, (1,), 6),
        (3, 5, (0,), 16),
        (3, 5, (1,), 24),
    ],
)
def test_rank_one_torus_orders(n: int, q: int, eps: tuple, order: int) -> None:
    signature = PartitionSignature(n, (1,), eps)

    assert torus_group(signature, field_create(q)).order == order


def test_anisotropic_torus_of_sl4() -> None:
    signature = PartitionSignature(4, (2,), (1,))

    # norm-one elements of GF(7^4)^x over GF(7)
    assert torus_group(signature, field_create(7)).order == 7**3 + 7**2 + 7 + 1


@pytest.mark.parametrize("n, q", [(4, 3), (5, 3), (4, 5)])
def test_presentation_matches_brute_force_counts(n: int, q: int) -> None:
    f = field_create(q)
    for signature, _ in conjugacy_reps(n):
        counts = brute_force_counts(signature, f)

        assert counts.torus_order == torus_group(signature, f).order
        assert counts.k_order == k_subgroup(signature, f).order


def test_brute_force_refuses_large_fields() -> None:
    signature = PartitionSignature(8, (4,), (1,))

    with pytest.raises(ScaleTooLarge):
        brute_force_counts(signature, field_create(11))


def test_order_criteria_follow_the_max_order_witness() -> None:
    f = field_create(13)
    for signature, _ in conjugacy_reps(6):
        witness = torus_model(signature, f).max_order_witness()
        zeta = zeta_criterion(signature, f)
        orbits = two_orbits_criterion(signature, f)

        assert (zeta is not None) == (witness.order % 2 == 0 and witness.order > 4)
        assert (orbits is not None) == (4 % witness.order != 0)


@pytest.mark.parametrize("eps", [(0,), (1,)])
def test_realized_sl2_tori(eps: tuple) -> None:
    f = field_create(5)
    signature = PartitionSignature(2, (1,), eps)

    realized = torus_realize(signature, f, "SL")

    assert realized.order == torus_group(signature, f).order
    assert realized.is_theta_stable()
    assert certify_realization(signature, f)


def test_realized_tori_of_sl4_over_gf3() -> None:
    f = field_create(3)
    for signature, _ in conjugacy_reps(4):
        assert certify_realization(signature, f)
        assert torus_realize(signature, f, "SL").is_theta_stable()


def test_torus_service_report() -> None:
    service = TorusService(Settings())

    report = service.report(TorusRequest(n=4, q=7, lam=[2], eps=[1]))

    assert report.torus_order == 400
    assert report.realized_order is None
    assert report.zeta == (report.max_order % 2 == 0 and report.max_order > 4)


@pytest.mark.parametrize("n, q", [(4, 3), (4, 5), (6, 7)])
def test_torus_report_flags_follow_the_criteria(n: int, q: int) -> None:
    service = TorusService(Settings())
    f = field_create(q)

    for signature, _ in conjugacy_reps(n):
        request = TorusRequest(n=n, q=q, lam=list(signature.lam), eps=list(signature.eps))
        report = service.report(request)

        assert report.zeta == (zeta_criterion(signature, f) is not None)
        assert report.two_orbits == (two_orbits_criterion(signature, f) is not None)


def test_torus_service_realizes_on_request() -> None:
    service = TorusService(Settings())

    report = service.report(TorusRequest(n=3, q=3, lam=[1], eps=[1], realize=True))

    assert report.realized_order == report.torus_order == 8
    assert report.theta_stable is True


def test_discrete_log_isomorphism_is_a_bijection() -> None:
    f = field_create(3)
    signature = PartitionSignature(4, (1, 1), (1, 0))

    mapping = isomorphism_by_logs(signature, f)

    assert len(mapping) == torus_realize(signature, f, "GL").order
    assert len(set(mapping.values())) == len(mapping)
    with pytest.raises(ScaleTooLarge):
        isomorphism_by_logs(PartitionSignature(4, (2,), (0,)), field_create(11))
