"""Finite fields GF(p^m), p odd, backed by :mod:`galois`.

Elements are ``galois.FieldArray`` scalars. Their integer representation is
the little-endian base-p packing of the polynomial coefficients, which is the
order used for every deterministic scan in this package.
"""

from __future__ import annotations

import logging
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import galois
from sympy import factorint, isprime

from twistrack.services.exceptions import (
    EvenCharacteristic,
    FactorTooLarge,
    FieldOverflow,
    InvalidInput,
    NotPrime,
    Reducible,
    ZeroElement,
)

logger = logging.getLogger(__name__)

INT64_MAX = 2**63 - 1
DEFAULT_FACTOR_CAP = 2**64

FieldElem = galois.FieldArray


@dataclass(frozen=True)
class FieldParams:
    """GF(p^m) with a fixed monic irreducible modulus.

    ``modulus`` lists coefficients little-endian and includes the leading 1.
    ``base_q`` is the order of the field this one was built over (``p`` for a
    field created directly), and fixes the meaning of :func:`frobenius`.
    """

    p: int
    m: int
    modulus: tuple[int, ...]
    base_q: int = 0
    factor_cap: int = field(default=DEFAULT_FACTOR_CAP, compare=False, repr=False)

    def __post_init__(self) -> None:
        if not self.base_q:
            object.__setattr__(self, "base_q", self.p)

    @property
    def q(self) -> int:
        return self.p**self.m

    @cached_property
    def GF(self) -> type[galois.FieldArray]:
        if self.m == 1:
            return galois.GF(self.p)
        prime_field = galois.GF(self.p)
        poly = galois.Poly(list(reversed(self.modulus)), field=prime_field)
        return galois.GF(self.p**self.m, irreducible_poly=poly)

    @cached_property
    def unit_primes(self) -> tuple[int, ...]:
        """Prime divisors of q - 1."""

        return tuple(sorted(_factor(self.q - 1, self.factor_cap)))

    def __call__(self, value: int | Sequence[int]) -> FieldElem:
        if isinstance(value, int):
            return self.GF(value % self.q)
        return self.GF(coeffs_to_int(value, self.p))

    def zero(self) -> FieldElem:
        return self.GF(0)

    def one(self) -> FieldElem:
        return self.GF(1)

    def elements(self) -> Iterator[FieldElem]:
        for code in range(self.q):
            yield self.GF(code)

    def units(self) -> Iterator[FieldElem]:
        for code in range(1, self.q):
            yield self.GF(code)

    @property
    def modulus_text(self) -> str:
        return f"{self.p}^{self.m}:" + ",".join(str(c) for c in self.modulus)

    def __str__(self) -> str:
        return f"GF({self.q})"


@dataclass(frozen=True)
class Extension:
    """GF(q^k) built over the prime field together with GF(q) -> GF(q^k)."""

    base: FieldParams
    field: FieldParams
    degree: int
    root: int  # image of the base generator X, as an integer code in ``field``

    def embed(self, x: FieldElem) -> FieldElem:
        big = self.field.GF
        if self.base.m == 1:
            return big(int(x))
        image = big(0)
        alpha = big(self.root)
        power = big(1)
        for coeff in int_to_coeffs(int(x), self.base.p, self.base.m):
            if coeff:
                image = image + big(coeff) * power
            power = power * alpha
        return image

    @cached_property
    def _restriction(self) -> dict[int, int]:
        return {int(self.embed(x)): int(x) for x in self.base.elements()}

    def restrict(self, y: FieldElem) -> FieldElem:
        """Inverse of :meth:`embed` on the image of GF(q)."""

        try:
            return self.base.GF(self._restriction[int(y)])
        except KeyError as exc:
            raise InvalidInput(f"{y} does not lie in the embedded {self.base}", cause=exc)

    def contains(self, y: FieldElem) -> bool:
        return int(y) in self._restriction


def coeffs_to_int(coeffs: Sequence[int], p: int) -> int:
    value = 0
    for coeff in reversed(list(coeffs)):
        value = value * p + int(coeff) % p
    return value


def int_to_coeffs(value: int, p: int, m: int) -> list[int]:
    coeffs = []
    for _ in range(m):
        value, digit = divmod(value, p)
        coeffs.append(digit)
    return coeffs


def _factor(n: int, cap: int) -> dict[int, int]:
    if n > cap:
        raise FactorTooLarge(f"refusing to factor {n} (cap {cap})")
    return factorint(n)


def _check_prime(p: int) -> None:
    if p == 2:
        raise EvenCharacteristic("characteristic 2 is not supported")
    if p < 2 or not isprime(p):
        raise NotPrime(f"{p} is not prime")


@lru_cache(maxsize=None)
def _smallest_irreducible(p: int, m: int) -> tuple[int, ...]:
    poly = galois.irreducible_poly(p, m, method="min")
    return tuple(int(c) for c in reversed(poly.coeffs.tolist()))


@lru_cache(maxsize=None)
def field_create(
    p: int,
    m: int = 1,
    modulus: tuple[int, ...] | None = None,
    *,
    base_q: int = 0,
) -> FieldParams:
    """Build GF(p^m); the modulus defaults to the smallest monic irreducible."""

    _check_prime(p)
    if m < 1:
        raise InvalidInput(f"extension degree must be positive, got {m}")
    if p**m > INT64_MAX:
        raise FieldOverflow(f"field order {p}^{m} exceeds 64 bits")
    if modulus is None:
        modulus = _smallest_irreducible(p, m)
    else:
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != m + 1 or modulus[-1] != 1:
            raise InvalidInput(f"modulus must be monic of degree {m}")
        poly = galois.Poly(list(reversed(modulus)), field=galois.GF(p))
        if not poly.is_irreducible():
            raise Reducible(f"{poly} is reducible over GF({p})")
    params = FieldParams(p=p, m=m, modulus=modulus, base_q=base_q or p)
    logger.debug("Created %s with modulus %s", params, params.modulus_text)
    return params


def prime_power(q: int) -> tuple[int, int]:
    """(p, m) with q = p^m, p odd."""

    if q < 3:
        raise InvalidInput(f"{q} is not an odd prime power")
    factors = factorint(q)
    if len(factors) != 1:
        raise InvalidInput(f"{q} is not a prime power")
    (p, m), = factors.items()
    if p == 2:
        raise EvenCharacteristic(f"{q} is a power of 2")
    return p, m


def field_of_order(q: int) -> FieldParams:
    p, m = prime_power(q)
    return field_create(p, m)


@lru_cache(maxsize=None)
def extension(base: FieldParams, k: int) -> Extension:
    """GF(q^k) over the prime field with degree m*k and the embedding of GF(q)."""

    big = field_create(base.p, base.m * k, base_q=base.q)
    if base.m == 1:
        return Extension(base=base, field=big, degree=k, root=0)
    poly = galois.Poly(list(reversed(base.modulus)), field=big.GF)
    roots = sorted(int(r) for r in poly.roots())
    if not roots:
        raise Reducible(f"{base} modulus has no root in {big}")
    return Extension(base=base, field=big, degree=k, root=roots[0])


def elem_order(x: FieldElem, f: FieldParams) -> int:
    """Multiplicative order, by descending through the prime divisors of q - 1."""

    if x == 0:
        raise ZeroElement("zero has no multiplicative order")
    order = f.q - 1
    for prime in f.unit_primes:
        while order % prime == 0 and x ** (order // prime) == 1:
            order //= prime
    return order


def is_primitive(x: FieldElem, f: FieldParams) -> bool:
    if x == 0:
        return False
    n = f.q - 1
    return all(x ** (n // prime) != 1 for prime in f.unit_primes)


@lru_cache(maxsize=None)
def _generator_code(f: FieldParams) -> int:
    for code in range(1, f.q):
        if is_primitive(f.GF(code), f):
            return code
    raise ZeroElement(f"{f} has no primitive element")  # pragma: no cover


def generator(f: FieldParams) -> FieldElem:
    """First element, in integer-code order, of multiplicative order q - 1."""

    return f.GF(_generator_code(f))


def frobenius(x: FieldElem, j: int, f: FieldParams) -> FieldElem:
    """x^(base_q^j), the j-th power of the Frobenius over the base field."""

    if x == 0 or j == 0:
        return x
    exponent = pow(f.base_q, j, f.q - 1) or (f.q - 1)
    return x**exponent


def q_bracket(b: int, a: int) -> int:
    """(b)_a = 1 + a + ... + a^(b-1)."""

    total = sum(a**i for i in range(b))
    if total > INT64_MAX:
        raise FieldOverflow(f"({b})_{a} exceeds 64 bits")
    return total


def trace_down(y: FieldElem, ext: Extension) -> FieldElem:
    """Trace from GF(q^k) to GF(q), returned as a base-field element."""

    total = ext.field.GF(0)
    conj = y
    for _ in range(ext.degree):
        total = total + conj
        conj = frobenius(conj, 1, ext.field)
    return ext.restrict(total)


def minimal_polynomial(alpha: FieldElem, ext: Extension) -> list[FieldElem]:
    """Coefficients (little-endian, monic) over GF(q) of the minimal polynomial.

    ``alpha`` must generate GF(q^k) over GF(q); the polynomial is the product of
    its k Frobenius conjugates.
    """

    big = ext.field.GF
    coeffs = [big(1)]
    conj = alpha
    for _ in range(ext.degree):
        shifted = [big(0)] + coeffs
        scaled = [c * conj for c in coeffs] + [big(0)]
        coeffs = [a - b for a, b in zip(shifted, scaled)]
        conj = frobenius(conj, 1, ext.field)
    return [ext.restrict(c) for c in coeffs]


def format_element(x: FieldElem, f: FieldParams) -> str:
    return f"{f.p}^{f.m}:" + ",".join(str(c) for c in int_to_coeffs(int(x), f.p, f.m))


def parse_element(text: str, f: FieldParams) -> FieldElem:
    """Parse ``p^m:c0,c1,...`` or a bare integer code."""

    text = text.strip()
    if ":" not in text:
        try:
            return f(int(text))
        except ValueError as exc:
            raise InvalidInput(f"cannot parse field element {text!r}", cause=exc)
    header, _, body = text.partition(":")
    try:
        p_text, _, m_text = header.partition("^")
        p, m = int(p_text), int(m_text or "1")
        coeffs = [int(c) for c in body.split(",") if c.strip()]
    except ValueError as exc:
        raise InvalidInput(f"cannot parse field element {text!r}", cause=exc)
    if (p, m) != (f.p, f.m) or len(coeffs) > m:
        raise InvalidInput(f"element {text!r} does not belong to {f}")
    return f(coeffs)


LOG_TABLE_LIMIT = 2**16


@lru_cache(maxsize=None)
def _log_table(f: FieldParams) -> dict[int, int]:
    g = generator(f)
    table = {}
    power = f.one()
    for i in range(f.q - 1):
        table[int(power)] = i
        power = power * g
    return table


def discrete_log(x: FieldElem, f: FieldParams) -> int:
    """i with generator(f)^i == x; table lookup for q <= 2^16."""

    if x == 0:
        raise ZeroElement("zero has no discrete logarithm")
    if f.q <= LOG_TABLE_LIMIT:
        return _log_table(f)[int(x)]
    return int(x.log(generator(f)))
