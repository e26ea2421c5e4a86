import os
import sys
from pathlib import Path

import pytest

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from twistrack.algebra.autos import theta, theta_apply, twisted_act
from twistrack.algebra.ffield import field_create
from twistrack.algebra.matgrp import MatrixGroup, is_scalar, proj_canon, proj_order
from twistrack.algebra.rack import orbit_enumerate
from twistrack.algebra.torus import torus_realize, two_orbits_criterion, zeta_criterion
from twistrack.algebra.weyl import PartitionSignature
from twistrack.schemas.classify import ClassDescriptor, XInfo
from twistrack.services.classifier import (
    ClassifierService,
    XState,
    expand_table,
    load_table,
    matches,
    odd_prime_powers,
    x_states,
)
from twistrack.services.exceptions import InvalidDescriptor, PreconditionViolated
from twistrack.services.oracle import exhaustive_typeD

TABLE_PATH = Path(__file__).resolve().parents[1] / "table1.json"


@pytest.fixture
def service() -> ClassifierService:
    return ClassifierService(table_path=TABLE_PATH)


def _classify(service: ClassifierService, n: int, q: int, lam, eps, **info):
    return service.classify(ClassDescriptor(n=n, q=q, lam=list(lam), eps=list(eps), x_info=XInfo(**info)))


def test_odd_prime_powers() -> None:
    assert odd_prime_powers(27) == [3, 5, 7, 9, 11, 13, 17, 19, 23, 25, 27]


@pytest.mark.parametrize(
    "n, q, lam, eps, tag",
    [
        (5, 3, (2,), (0,), "Tw.1"),
        (8, 5, (2, 1, 1), (0, 0, 0), "Tw.2"),
        (6, 7, (2, 1), (0, 0), "r2e0"),
        (6, 3, (2, 1), (1, 0), "r2e1"),
        (8, 3, (1, 1, 1, 1), (0, 0, 0, 0), "weyl-j"),
        (6, 7, (1, 1, 1), (1, 1, 1), "Tw.3"),
        (3, 11, (1,), (0,), "Tw.4"),
        (4, 13, (1, 1), (1, 0), "Tw.5"),
        (6, 3, (3,), (0,), "5.9"),
        (8, 7, (4,), (1,), "5.12"),
    ],
)
def test_certified_branches(service, n, q, lam, eps, tag) -> None:
    verdict = _classify(service, n, q, lam, eps)

    assert verdict.outcome == "TypeD"
    assert verdict.justification == tag


@pytest.mark.parametrize(
    "n, q, lam, eps, row",
    [
        (6, 5, (2, 1), (0, 1), "r2-q35"),
        (4, 3, (2,), (0,), "r1e0-n4-q37"),
        (4, 9, (2,), (0,), "r1e0-n4-q59"),
        (4, 7, (2,), (1,), "r1e1-n4-q37"),
        (6, 7, (3,), (1,), "r1e1-2odd"),
        (4, 5, (1, 1), (0, 0), "one-q35"),
        (3, 13, (1,), (1,), "one-n3"),
        (4, 7, (1, 1), (1, 1), "one-n4-3mod4"),
        (4, 9, (1, 1), (1, 0), "one-n4-q9"),
    ],
)
def test_exception_rows(service, n, q, lam, eps, row) -> None:
    verdict = _classify(service, n, q, lam, eps)

    assert verdict.outcome == "PossibleException"
    assert verdict.table_row == row


def test_rank_two_refinement_at_q5() -> None:
    verdict = ClassifierService().classify(ClassDescriptor(n=8, q=5, lam=[2, 2], eps=[0, 0]))

    assert verdict.outcome == "TypeD"
    assert verdict.justification == "r2e0"
    assert verdict.witness["refinement"] is True


def test_missing_class_is_the_only_exception_of_its_signature(service) -> None:
    unknown = _classify(service, 6, 7, (3,), (1,))
    excluded = _classify(service, 6, 7, (3,), (1,), is_missing_class=False)
    named = _classify(service, 6, 7, (3,), (1,), is_missing_class=True)

    assert unknown.outcome == "PossibleException"
    assert len(unknown.notes) == 3
    assert excluded.outcome == "TypeD" and excluded.justification == "5.12"
    assert named.table_row == "r1e1-2odd"


def test_class_of_one_in_psl4(service) -> None:
    at_3 = _classify(service, 4, 3, (1, 1), (0, 0), is_identity_coset=True)
    at_11 = _classify(service, 4, 11, (1, 1), (0, 0), is_identity_coset=True)
    at_7 = _classify(service, 4, 7, (1, 1), (0, 0), is_identity_coset=True)

    assert at_3.outcome == "NotTypeD" and at_3.justification == "oracle"
    assert at_11.outcome == "TypeD" and at_11.justification == "5.10"
    assert at_7.table_row == "one-n4-3mod4"


def test_theta_inverse_decides_rank_one_eps0(service) -> None:
    involution = _classify(service, 4, 11, (2,), (0,), theta_inverse=True)
    other = _classify(service, 4, 11, (2,), (0,), theta_inverse=False)

    assert involution.justification == "5.10"
    assert other.justification == "5.9"


def test_x_states_branch_only_where_x_matters() -> None:
    split = PartitionSignature(4, (1, 1), (0, 0))
    rank_one = PartitionSignature(6, (3,), (1,))

    assert len(x_states(split, XInfo())) == 3
    assert x_states(split, XInfo(is_identity_coset=True)) == [XState(True, True, False)]
    assert len(x_states(rank_one, XInfo())) == 3
    with pytest.raises(InvalidDescriptor):
        x_states(split, XInfo(is_identity_coset=True, theta_inverse=False))
    with pytest.raises(InvalidDescriptor):
        x_states(PartitionSignature(8, (4,), (1,)), XInfo(is_missing_class=True))


def test_invalid_descriptors(service) -> None:
    with pytest.raises(InvalidDescriptor):
        _classify(service, 2, 3, (1,), (0,))
    with pytest.raises(InvalidDescriptor):
        _classify(service, 4, 15, (2,), (0,))
    with pytest.raises(InvalidDescriptor):
        _classify(service, 6, 7, (2, 2), (0, 0))


def test_evidence_is_attached_to_torus_verdicts(service) -> None:
    descriptor = ClassDescriptor(n=6, q=7, lam=[1, 1, 1], eps=[1, 1, 1])

    verdict = service.classify(descriptor, with_evidence=True)

    assert verdict.justification == "Tw.3"
    assert {"gamma_image", "max_order", "zeta", "two_orbits"} <= set(verdict.witness)
    signature = PartitionSignature(6, (1, 1, 1), (1, 1, 1))
    assert verdict.witness["zeta"] == (zeta_criterion(signature, field_create(7)) is not None)
    assert verdict.witness["two_orbits"] == (two_orbits_criterion(signature, field_create(7)) is not None)


def test_selectors() -> None:
    assert matches({}, 9)
    assert matches({"values": [3, 5]}, 5)
    assert not matches({"parity": "even"}, 7)
    assert matches({"twice_odd": True}, 6)
    assert not matches({"twice_odd": True}, 8)
    assert matches({"mod": 4, "residue": 3}, 11)


def test_sweep_matches_the_transcribed_table(service) -> None:
    report = service.sweep(8, 13)

    assert report.golden_match is True
    assert report.missing == [] and report.extra == []
    assert len(report.entries) == len(expand_table(load_table(TABLE_PATH), 8, 13))


def test_threaded_sweep_is_identical(service) -> None:
    threaded = ClassifierService(workers=8, table_path=TABLE_PATH)

    assert threaded.table_sweep(6, 9) == service.table_sweep(6, 9)


def test_main_theorem_range(service) -> None:
    twice_odd = service.main_theorem_check(6, 7)
    doubly_even = service.main_theorem_check(8, 7)

    assert twice_odd.holds
    assert [(e.lam, e.eps, e.row) for e in twice_odd.exceptions] == [([3], [1], "r1e1-2odd")]
    assert doubly_even.holds and doubly_even.exceptions == []
    assert service.main_theorem_check(5, 7).exceptions == []
    with pytest.raises(PreconditionViolated):
        service.main_theorem_check(4, 7)


def test_rank_two_refinements(service) -> None:
    found = service.rank_two_refinements(8)

    assert [(r.n, r.q, r.lam, r.eps) for r in found] == [(8, 5, [2, 2], [0, 0])]


def test_monotonicity_in_q(service) -> None:
    assert service.monotonicity_report(6, 13) == []


@pytest.mark.slow
def test_type_d_verdict_survives_the_exhaustive_check_in_pgl4_5(service) -> None:
    # x theta(x) is scalar, so the <x>-twisted class of x is its odd powers,
    # itself a subrack of the theta-class of x
    f = field_create(5)
    group = MatrixGroup(f, 4, "PGL")
    psi = theta(group)
    realized = torus_realize(PartitionSignature(4, (2,), (1,)), f, "GL")
    x = next(
        group.lift(y)
        for y in realized.elements.values()
        if is_scalar(y @ theta_apply(y)) and proj_order(proj_canon(y @ y), f) == 6
    )
    verdict = _classify(service, 4, 5, (2,), (1,), theta_inverse=True)

    orbit = orbit_enumerate(x, [x], psi, cap=1000)
    result = exhaustive_typeD(orbit.elements, psi, base=x, subgroup_cap=1000)

    assert verdict.outcome == "TypeD" and verdict.justification == "5.12"
    assert result.is_type_d is True
    assert twisted_act(x, x, psi) in orbit
