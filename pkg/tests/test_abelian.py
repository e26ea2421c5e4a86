import os
import sys

import pytest

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from twistrack.algebra.abelian import CyclicProduct, smith_invariants
from twistrack.algebra.rack import abelian_twisted_orbit
from twistrack.services.exceptions import InvalidInput


def test_invariant_factors_divide_each_other() -> None:
    group = CyclicProduct((4, 6))

    assert group.invariants == (2, 12)
    assert group.order == 24
    assert group.exponent == 12
    assert str(group) == "Z2 x Z12"
    assert not group.is_cyclic()
    assert CyclicProduct((4, 9)).is_cyclic()


def test_smith_invariants_drop_units() -> None:
    assert smith_invariants([[2, 0], [0, 3]]) == (6,)
    assert smith_invariants([]) == ()


def test_quotient_and_subgroup_of_cyclic_group() -> None:
    group = CyclicProduct((12,))

    assert group.quotient([(4,)]).order == 4
    assert group.subgroup([(4,)]).order == 3
    assert group.subgroup([(0,)]).is_trivial()


def test_kernel_of_reduction_map() -> None:
    group = CyclicProduct((12,))

    kernel, gens = group.kernel([[1]], CyclicProduct((4,)))

    assert kernel.order == 3
    assert all(g[0] % 4 == 0 for g in gens)


def test_kernel_of_sum_map_is_antidiagonal() -> None:
    group = CyclicProduct((4, 4))

    kernel, gens = group.kernel([[1, 1]], CyclicProduct((4,)))

    assert kernel.order == 4
    assert all((a + b) % 4 == 0 for a, b in gens)


def test_max_order_combination_reaches_exponent() -> None:
    group = CyclicProduct((4, 9))
    gens = [(2, 0), (0, 3)]

    coeffs, exponent = group.max_order_combination(gens)
    combined = group.reduce([sum(c * g[i] for c, g in zip(coeffs, gens)) for i in range(2)])

    assert exponent == 6
    assert group.element_order(combined) == 6


def test_twisted_orbit_of_coordinate_swap() -> None:
    group = CyclicProduct((4, 4))

    image = abelian_twisted_orbit(group, [[0, 1], [1, 0]])

    assert image.order == 4


def test_reduce_checks_rank() -> None:
    with pytest.raises(InvalidInput):
        CyclicProduct((3, 3)).reduce([1])
    with pytest.raises(InvalidInput):
        CyclicProduct((0,))
