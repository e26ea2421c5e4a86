import os
import sys

import pytest

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from twistrack.algebra.weyl import (
    PartitionSignature,
    admissible_eps,
    commutes_with_w0,
    compose,
    conjugacy_class_count,
    conjugacy_reps,
    cycle,
    eps_j,
    format_perm,
    longest_element,
    parse_signature,
    partitions_of,
    sigma,
    sym_class_typeD,
    theta_perm,
    theta_weyl_group,
    weyl_j_class,
)
from twistrack.services.exceptions import InvalidSignature, TooLarge


def test_partitions_largest_first() -> None:
    assert partitions_of(3) == [(3,), (2, 1), (1, 1, 1)]
    assert len(partitions_of(5)) == 7


def test_admissible_eps_forbids_zero_before_one_on_equal_parts() -> None:
    assert admissible_eps((1, 1)) == [(0, 0), (1, 0), (1, 1)]
    assert len(admissible_eps((2, 1))) == 4


@pytest.mark.parametrize("n, classes, order", [(4, 5, 8), (5, 5, 8), (6, 10, 48)])
def test_class_reps_match_brute_force_class_count(n: int, classes: int, order: int) -> None:
    group = theta_weyl_group(n)

    assert len(group) == order
    assert len(conjugacy_reps(n)) == classes
    assert conjugacy_class_count(group) == classes


def test_sigma_lies_in_the_theta_fixed_weyl_group() -> None:
    for signature, perm in conjugacy_reps(7):
        assert commutes_with_w0(perm, 7)
        assert perm == sigma(signature)


def test_signature_validation() -> None:
    with pytest.raises(InvalidSignature):
        PartitionSignature(6, (1, 2), (0, 0))
    with pytest.raises(InvalidSignature):
        PartitionSignature(4, (1, 1), (0, 1))
    with pytest.raises(InvalidSignature):
        PartitionSignature(6, (2,), (0,))


def test_parse_signature_text() -> None:
    signature = parse_signature("lambda=2,1;eps=1,0", 6)

    assert signature.lam == (2, 1)
    assert signature.eps == (1, 0)
    assert signature.r == 2
    assert signature.block_ends == (2, 3)
    assert signature.text() == "lambda=2,1;eps=1,0"
    with pytest.raises(InvalidSignature):
        parse_signature("lambda=2,1", 6)


def test_compose_acts_right_to_left() -> None:
    a = cycle([1, 2], 3)
    b = cycle([2, 3], 3)

    ab = compose(a, b)

    # b sends 3 to 2, then a sends 2 to 1
    assert ab(2) == 0
    assert format_perm(ab) == "(1,2,3)"


def test_eps_j_and_j_classes() -> None:
    assert eps_j(3, 1) == (1, 1, 0)
    assert weyl_j_class(5, 1) == (3, (2, 1))
    assert weyl_j_class(6, 2) == (4, (2, 2))
    with pytest.raises(InvalidSignature):
        eps_j(2, 3)


def test_transpositions_are_not_type_d() -> None:
    assert sym_class_typeD(5, (2, 1, 1, 1)) is False
    with pytest.raises(TooLarge):
        sym_class_typeD(10, (2,) + (1,) * 8)


def test_theta_acts_on_permutations_by_w0_conjugation() -> None:
    w0 = longest_element(5)

    assert w0(0) == 4 and w0(2) == 2
    assert theta_perm(cycle([1, 2], 5), 5) == cycle([4, 5], 5)
    assert not commutes_with_w0(cycle([1, 2], 5), 5)
