import os
import sys

import pytest

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from twistrack.algebra.ffield import (
    discrete_log,
    elem_order,
    extension,
    field_create,
    field_of_order,
    format_element,
    frobenius,
    generator,
    is_primitive,
    minimal_polynomial,
    parse_element,
    prime_power,
    q_bracket,
    trace_down,
)
from twistrack.services.exceptions import (
    EvenCharacteristic,
    InvalidInput,
    NotPrime,
    Reducible,
    ZeroElement,
)


def test_prime_field_generator_is_smallest_primitive() -> None:
    f = field_create(7)

    assert f.q == 7
    assert int(generator(f)) == 3
    assert elem_order(f(2), f) == 3
    assert elem_order(f(6), f) == 2
    assert is_primitive(f(5), f)


def test_field_create_rejects_bad_characteristic() -> None:
    with pytest.raises(EvenCharacteristic):
        field_create(2)
    with pytest.raises(NotPrime):
        field_create(9)


def test_field_create_rejects_reducible_modulus() -> None:
    # x^2 - 1 = (x - 1)(x + 1) over GF(3)
    with pytest.raises(Reducible):
        field_create(3, 2, modulus=(2, 0, 1))


def test_prime_power_splits_odd_prime_powers() -> None:
    assert prime_power(9) == (3, 2)
    assert prime_power(125) == (5, 3)
    with pytest.raises(InvalidInput):
        prime_power(12)
    with pytest.raises(EvenCharacteristic):
        prime_power(8)
    assert field_of_order(27).m == 3


def test_zero_has_no_order() -> None:
    f = field_create(5)
    with pytest.raises(ZeroElement):
        elem_order(f.zero(), f)


def test_frobenius_has_order_m() -> None:
    f = field_create(3, 2)
    x = generator(f)

    assert frobenius(x, 1, f) == x**3
    assert frobenius(x, 2, f) == x
    assert frobenius(f.zero(), 1, f) == 0


def test_minimal_polynomial_of_quadratic_generator() -> None:
    base = field_create(3)
    ext = extension(base, 2)
    alpha = generator(ext.field)

    coeffs = minimal_polynomial(alpha, ext)

    assert len(coeffs) == 3
    assert coeffs[-1] == 1
    # constant term is the norm of a generator, which generates GF(3)^x
    assert coeffs[0] == 2
    assert trace_down(alpha, ext) == -coeffs[1]


def test_extension_embeds_base_field() -> None:
    base = field_create(3, 2)
    ext = extension(base, 2)
    x = generator(base)

    image = ext.embed(x)

    assert ext.contains(image)
    assert ext.restrict(image) == x
    assert ext.embed(x * x) == image * image


def test_element_text_format() -> None:
    f = field_create(5, 2)
    x = f([3, 4])

    text = format_element(x, f)

    assert text == "5^2:3,4"
    assert parse_element(text, f) == x
    assert parse_element("7", f) == f(7)
    with pytest.raises(InvalidInput):
        parse_element("3^2:1,1", f)


def test_q_bracket_and_discrete_log() -> None:
    f = field_create(11)
    g = generator(f)

    assert q_bracket(3, 2) == 7
    assert q_bracket(1, 9) == 1
    assert discrete_log(g**7, f) == 7
