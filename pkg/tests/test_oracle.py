import json
import os
import sys
from pathlib import Path

import pytest

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from twistrack.algebra.autos import identity_automorphism, theta
from twistrack.algebra.ffield import field_create
from twistrack.algebra.matgrp import MatrixGroup, parse_matrix
from twistrack.algebra.rack import inner_orbit, orbit_enumerate, typeD_condition
from twistrack.config import Settings
from twistrack.schemas.classify import ClassDescriptor, XInfo
from twistrack.services.classifier import ClassifierService
from twistrack.services.exceptions import BudgetExceeded, UnsupportedKind
from twistrack.services.oracle import OracleService, exhaustive_typeD
from twistrack.services.special import SpecialService, is_m_shape

TABLE_PATH = Path(__file__).resolve().parents[1] / "table1.json"


@pytest.fixture
def oracle(tmp_path) -> OracleService:
    return OracleService(Settings(cache_dir=tmp_path, seed=3))


def test_enumerates_small_groups(oracle) -> None:
    assert len(oracle.enumerate("PSL", 2, 5)) == 60
    assert len(oracle.enumerate("SL", 2, 3)) == 24
    assert len(oracle.enumerate("PGL", 2, 3)) == 24


def test_group_cache_is_written_and_reused(oracle, tmp_path) -> None:
    first = oracle.enumerate("PSL", 2, 3)
    path = tmp_path / "PSL_n2_q3.json"

    header = json.loads(path.read_text())["header"]
    second = oracle.enumerate("PSL", 2, 3)

    assert header["size"] == 12
    assert header["group"] == "PSL_2(3)"
    assert sorted(first.elements) == sorted(second.elements)


def test_stale_cache_is_ignored(oracle, tmp_path) -> None:
    path = tmp_path / "PSL_n2_q3.json"
    path.write_text(json.dumps({"header": {"group": "PSL_2(3)", "size": 1}, "keys": ["00"]}))

    assert len(oracle.enumerate("PSL", 2, 3)) == 12


def test_unknown_kind(oracle) -> None:
    with pytest.raises(UnsupportedKind):
        oracle.enumerate("SU", 2, 3)


def test_theta_classes_of_psl2_are_conjugacy_classes(oracle) -> None:
    orbits = oracle.partition("PSL", 2, 5)

    # theta is the identity on SL_2, so these are the classes of A_5
    assert sorted(len(orbit) for orbit in orbits) == [1, 12, 12, 15, 20]


def test_twisted_class_count_matches_semidirect_count(oracle) -> None:
    twisted, coset = oracle.class_count_check(2, 5)

    assert twisted == coset == 5


def test_involutions_of_a5_are_not_type_d(oracle) -> None:
    orbits = oracle.partition("PSL", 2, 5)
    involutions = next(orbit for orbit in orbits if len(orbit) == 15)

    result = oracle.exhaustive(involutions)

    assert result.is_type_d is False
    assert result.witness is None
    assert result.pairs_tried == 14


def test_exhaustive_search_respects_its_limit(oracle) -> None:
    orbits = oracle.partition("PSL", 2, 5)
    largest = max(orbits, key=len)

    with pytest.raises(BudgetExceeded):
        exhaustive_typeD(largest.elements, largest.psi, subgroup_cap=100, limit=10)


@pytest.mark.slow
def test_theta_classes_of_psl3_3(oracle) -> None:
    twisted, coset = oracle.class_count_check(3, 3)

    assert twisted == coset


@pytest.mark.slow
def test_semisimple_classes_meet_a_torus(oracle) -> None:
    report = oracle.theorem51(3, 3)

    assert report.covered
    assert report.uncovered == []
    assert 0 < report.semisimple_classes <= report.classes


def test_partition_does_not_depend_on_worker_count(oracle, tmp_path) -> None:
    threaded = OracleService(Settings(cache_dir=tmp_path, seed=3, workers=8))

    serial = oracle.partition("PSL", 3, 3)
    sharded = threaded.partition("PSL", 3, 3)

    assert [sorted(orbit.keys()) for orbit in serial] == [sorted(orbit.keys()) for orbit in sharded]


@pytest.mark.slow
def test_theta_class_of_one_in_psl4_3_is_not_type_d(oracle) -> None:
    group = MatrixGroup(field_create(3), 4, "PSL")
    orbit = orbit_enumerate(group.identity(), group.generators(), theta(group), cap=10_000)
    verdict = ClassifierService(table_path=TABLE_PATH).classify(
        ClassDescriptor(n=4, q=3, lam=[1, 1], eps=[0, 0], x_info=XInfo(is_identity_coset=True))
    )

    result = oracle.exhaustive(orbit)

    assert all(is_m_shape(y) for y in orbit)
    assert result.is_type_d is False
    assert result.pairs_tried == len(orbit) - 1
    assert verdict.outcome == "NotTypeD"


@pytest.mark.slow
def test_exhaustive_agrees_with_the_unipotent_witness_in_psl4_5() -> None:
    f = field_create(5)
    group = MatrixGroup(f, 4, "PSL")
    plain = identity_automorphism(group)
    report = SpecialService(Settings(seed=3)).unipotent(4, 5)
    r = group.normalize(group.lift(parse_matrix(report.r, f)))
    s = group.normalize(group.lift(parse_matrix(report.s, f)))

    # both <r, s>-classes together form a subrack holding the pair
    rack = {**inner_orbit(r, [r, s], plain, cap=10_000), **inner_orbit(s, [r, s], plain, cap=10_000)}
    result = exhaustive_typeD(rack, plain, base=r, subgroup_cap=10_000)

    assert group.key(s) in rack
    assert result.is_type_d is True
    assert typeD_condition(result.witness.r, result.witness.s, plain)
    assert not set(result.witness.subrack_r) & set(result.witness.subrack_s)


@pytest.mark.slow
@pytest.mark.parametrize("n, q", [(3, 5), (4, 3)])
def test_semisimple_classes_meet_a_torus_beyond_psl3_3(tmp_path, n: int, q: int) -> None:
    oracle = OracleService(Settings(cache_dir=tmp_path, group_cap=20_000_000, orbit_cap=20_000_000))

    report = oracle.theorem51(n, q)

    assert report.covered
    assert report.uncovered == []
