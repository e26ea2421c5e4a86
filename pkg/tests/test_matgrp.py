import os
import sys

import numpy as np
import pytest

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from twistrack.algebra.autos import theta_fixed
from twistrack.algebra.ffield import field_create
from twistrack.algebra.matgrp import (
    MatrixGroup,
    closure,
    det,
    format_matrix,
    from_key,
    group_generators,
    identity,
    inverse,
    is_scalar,
    mat_key,
    matrix,
    parse_matrix,
    proj_canon,
    proj_order,
    psl_membership,
    sl_order,
)
from twistrack.services.exceptions import InvalidInput, Singular, UnsupportedKind


def test_psl2_closure_sizes() -> None:
    f3 = field_create(3)
    f5 = field_create(5)

    assert len(closure(MatrixGroup(f3, 2, "PSL").generators(), MatrixGroup(f3, 2, "PSL"), cap=100)) == 12
    assert len(closure(MatrixGroup(f3, 2, "SL").generators(), MatrixGroup(f3, 2, "SL"), cap=100)) == 24
    assert len(closure(MatrixGroup(f5, 2, "PSL").generators(), MatrixGroup(f5, 2, "PSL"), cap=100)) == 60


def test_sl_order_formula() -> None:
    assert sl_order(2, 3) == 24
    assert sl_order(2, 5) == 120
    assert sl_order(3, 3) == 5616


def test_proj_canon_identifies_scalar_multiples() -> None:
    f = field_create(7)
    x = matrix(f, [[2, 1], [3, 4]])

    canon = proj_canon(x)

    assert canon[0, 0] == 1
    assert np.array_equal(proj_canon(x * f(3)), canon)
    with pytest.raises(Singular):
        proj_canon(matrix(f, [[1, 2], [2, 4]]))


def test_projective_and_linear_orders_differ() -> None:
    f = field_create(7)
    s = matrix(f, [[0, 1], [-1, 0]])

    assert MatrixGroup(f, 2, "SL").order(s) == 4
    assert MatrixGroup(f, 2, "PSL").order(proj_canon(s)) == 2
    assert proj_order(proj_canon(s), f) == 2


def test_psl_membership_uses_determinant_classes() -> None:
    f = field_create(5)
    # det 4 = 2^2 is a square, so a scalar multiple has determinant 1
    assert psl_membership(matrix(f, [[2, 0], [0, 2]]), f)
    assert not psl_membership(matrix(f, [[2, 0], [0, 1]]), f)
    assert MatrixGroup(f, 2, "PGL").contains(matrix(f, [[2, 0], [0, 1]]))


def test_keys_round_trip_and_order_matrices() -> None:
    f = field_create(5, 2)
    x = matrix(f, [[1, 24], [7, 3]])

    assert np.array_equal(from_key(f, 2, mat_key(x)), x)
    assert mat_key(identity(f, 2)) < mat_key(x)


def test_matrix_text_accepts_codes_and_element_syntax() -> None:
    f = field_create(3, 2)
    x = matrix(f, [[1, 4], [0, 8]])

    assert np.array_equal(parse_matrix("1,4;0,8", f), x)
    assert np.array_equal(parse_matrix(format_matrix(x, f), f), x)
    with pytest.raises(InvalidInput):
        parse_matrix("1,2;3", f)


def test_inverse_and_singular_matrices() -> None:
    f = field_create(11)
    x = matrix(f, [[3, 1], [4, 2]])

    assert np.array_equal(x @ inverse(x), identity(f, 2))
    assert det(x) == 2
    with pytest.raises(Singular):
        inverse(matrix(f, [[1, 1], [1, 1]]))


def test_sp_and_so_generators_are_theta_fixed() -> None:
    f = field_create(5)

    for kind, n in (("Sp", 4), ("SO", 3), ("SO", 5)):
        for g in group_generators(kind, n, f):
            assert det(g) == 1
            assert theta_fixed(g)


def test_group_generators_reject_wrong_parity() -> None:
    f = field_create(3)
    with pytest.raises(UnsupportedKind):
        group_generators("Sp", 3, f)
    with pytest.raises(UnsupportedKind):
        group_generators("SO", 4, f)
    with pytest.raises(UnsupportedKind):
        MatrixGroup(f, 2, "PSp")


def test_projective_identity_is_any_scalar() -> None:
    f = field_create(7)
    group = MatrixGroup(f, 3, "PGL")

    assert group.is_identity(identity(f, 3) * f(3))
    assert is_scalar(identity(f, 3) * f(5))
    assert not group.is_identity(matrix(f, [[1, 1, 0], [0, 1, 0], [0, 0, 1]]))
