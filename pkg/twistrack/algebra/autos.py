"""Automorphisms Ad(t) . theta^a . Fr^b of GL/SL/PGL/PSL, twisted actions and norms."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache, reduce

import numpy as np

from twistrack.algebra.ffield import FieldParams
from twistrack.algebra.matgrp import (
    GroupMat,
    MatrixGroup,
    det,
    inverse,
    is_scalar,
    parse_matrix,
    proj_canon,
    proj_order,
)
from twistrack.services.exceptions import (
    InternalInconsistency,
    InvalidAutomorphism,
    InvalidDescriptor,
    OrderNotCoprime,
    ServiceError,
)

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def _j_cached(n: int, gf: type) -> GroupMat:
    j = gf.Zeros((n, n))
    for i in range(n):
        j[i, n - 1 - i] = gf(1) if i % 2 == 0 else -gf(1)
    return j


def j_like(x: GroupMat) -> GroupMat:
    """J_n over the field of ``x``."""

    return _j_cached(x.shape[0], type(x))


def j_matrix(n: int, f: FieldParams) -> GroupMat:
    """The antidiagonal matrix with (i, n+1-i) entry (-1)^(i-1)."""

    return _j_cached(n, f.GF).copy()


def theta_apply(x: GroupMat, *, projective: bool = False) -> GroupMat:
    """J (x^-1)^T J^-1; J is signed-orthogonal so J^-1 = J^T."""

    j = _j_cached(x.shape[0], type(x))
    image = j @ inverse(x).T @ j.T
    return proj_canon(image) if projective else image


def frobenius_matrix(x: GroupMat, b: int, f: FieldParams) -> GroupMat:
    """Entrywise x -> x^(p^b)."""

    b %= f.m
    if b == 0:
        return x
    return x ** (f.p**b)


@dataclass(frozen=True, eq=False)
class Automorphism:
    """psi = Ad(inner) . theta^graph_power . Fr_p^frob_power on ``group``."""

    group: MatrixGroup
    inner: GroupMat | None = None
    graph_power: int = 0
    frob_power: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "graph_power", self.graph_power % 2)
        object.__setattr__(self, "frob_power", self.frob_power % self.group.field.m)
        if self.inner is not None:
            if self.inner.shape != (self.group.n, self.group.n) or det(self.inner) == 0:
                raise InvalidAutomorphism("inner part must be an invertible n x n matrix")
            object.__setattr__(self, "inner", self.group.normalize(self.inner))

    def __call__(self, x: GroupMat) -> GroupMat:
        y = frobenius_matrix(x, self.frob_power, self.group.field)
        if self.graph_power:
            y = theta_apply(y)
        if self.inner is not None:
            y = self.inner @ y @ inverse(self.inner)
        return self.group.normalize(y)

    def compose(self, other: "Automorphism") -> "Automorphism":
        """self . other, in normal form."""

        outer = Automorphism(self.group, None, self.graph_power, self.frob_power)
        t2 = other.inner if other.inner is not None else self.group.identity()
        t1 = self.inner if self.inner is not None else self.group.identity()
        inner = t1 @ outer(t2)
        return Automorphism(
            self.group,
            inner,
            self.graph_power + other.graph_power,
            self.frob_power + other.frob_power,
        )

    def power(self, k: int) -> "Automorphism":
        result = identity_automorphism(self.group)
        for _ in range(k):
            result = self.compose(result)
        return result

    def fixes(self, gens: list[GroupMat]) -> bool:
        return all(np.array_equal(self(g), g) for g in gens)

    @cached_property
    def _order_value(self) -> int:
        return _order(self)

    def order(self) -> int:
        """Least k >= 1 with psi^k trivial on the stored generating set."""

        return self._order_value

    def validate(self) -> "Automorphism":
        for g in self.group.generators():
            if not self.group.contains(self(g)):
                raise InvalidAutomorphism(f"{self} does not preserve {self.group}")
        return self

    def __str__(self) -> str:
        parts = []
        if self.inner is not None and not is_scalar(self.inner):
            parts.append("ad")
        if self.graph_power:
            parts.append("theta")
        if self.frob_power:
            parts.append(f"frob^{self.frob_power}")
        return "*".join(parts) or "id"


def _order(psi: Automorphism) -> int:
    gens = psi.group.generators()
    cap = 2 * psi.group.field.m * psi.group.order_bound
    power = psi
    k = 1
    while not power.fixes(gens):
        power = psi.compose(power)
        k += 1
        if k > cap:
            raise InternalInconsistency(f"automorphism order exceeds {cap}")
    return k


def identity_automorphism(group: MatrixGroup) -> Automorphism:
    return Automorphism(group)


def theta(group: MatrixGroup) -> Automorphism:
    return Automorphism(group, graph_power=1)


def frob(group: MatrixGroup, b: int = 1) -> Automorphism:
    return Automorphism(group, frob_power=b)


def inner(group: MatrixGroup, t: GroupMat) -> Automorphism:
    return Automorphism(group, inner=t)


def parse_automorphism(text: str, group: MatrixGroup) -> Automorphism:
    """Parse ``theta``, ``frob^b``, ``ad:<matrix>`` or ``id`` joined by ``*``.

    ``a*b`` denotes a . b, so the rightmost factor acts first.
    """

    factors = []
    for token in (part.strip() for part in text.split("*")):
        if not token:
            raise InvalidDescriptor(f"empty factor in {text!r}")
        if token == "id":
            factors.append(identity_automorphism(group))
        elif token == "theta":
            factors.append(theta(group))
        elif token == "frob" or token.startswith("frob^"):
            _, _, exponent = token.partition("^")
            try:
                factors.append(frob(group, int(exponent or "1")))
            except ValueError as exc:
                raise InvalidDescriptor(f"bad Frobenius power in {token!r}", cause=exc)
        elif token.startswith("ad:"):
            try:
                factors.append(inner(group, parse_matrix(token[3:], group.field)))
            except ServiceError as exc:
                raise InvalidDescriptor(f"bad inner automorphism {token!r}: {exc}", cause=exc)
        else:
            raise InvalidDescriptor(f"unknown automorphism factor {token!r}")
    psi = reduce(lambda a, b: a.compose(b), factors)
    return psi.validate()


def twisted_act(g: GroupMat, x: GroupMat, psi: Automorphism) -> GroupMat:
    """g . x . psi(g)^-1."""

    group = psi.group
    return group.mul(group.mul(g, x), group.inv(psi(g)))


def norm_psi(x: GroupMat, psi: Automorphism) -> GroupMat:
    """x psi(x) ... psi^(l-1)(x) with l the order of psi."""

    group = psi.group
    total = x
    image = x
    for _ in range(psi.order() - 1):
        image = psi(image)
        total = group.mul(total, image)
    return total


@dataclass(frozen=True, eq=False)
class SemidirectProduct:
    """H x| <psi> with (h1, k1)(h2, k2) = (h1 psi^k1(h2), k1 + k2 mod l)."""

    psi: Automorphism

    @property
    def ell(self) -> int:
        return self.psi.order()

    def identity(self) -> tuple[GroupMat, int]:
        return self.psi.group.identity(), 0

    def apply_power(self, h: GroupMat, k: int) -> GroupMat:
        for _ in range(k % self.ell):
            h = self.psi(h)
        return h

    def mul(self, a: tuple[GroupMat, int], b: tuple[GroupMat, int]) -> tuple[GroupMat, int]:
        h1, k1 = a
        h2, k2 = b
        return self.psi.group.mul(h1, self.apply_power(h2, k1)), (k1 + k2) % self.ell

    def inv(self, a: tuple[GroupMat, int]) -> tuple[GroupMat, int]:
        h, k = a
        back = (-k) % self.ell
        return self.apply_power(self.psi.group.inv(h), back), back

    def pow(self, a: tuple[GroupMat, int], e: int) -> tuple[GroupMat, int]:
        result = self.identity()
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def is_identity(self, a: tuple[GroupMat, int]) -> bool:
        h, k = a
        return k == 0 and self.psi.group.is_identity(h)

    def key(self, a: tuple[GroupMat, int]) -> bytes:
        h, k = a
        return self.psi.group.key(h) + k.to_bytes(2, "big")

    def order(self, a: tuple[GroupMat, int]) -> int:
        cap = self.ell * self.psi.group.order_bound
        power = a
        k = 1
        while not self.is_identity(power):
            power = self.mul(power, a)
            k += 1
            if k > cap:
                raise InternalInconsistency(f"semidirect order exceeds {cap}")
        return k

    def embed(self, y: GroupMat) -> tuple[GroupMat, int]:
        """y -> y psi."""

        return y, 1 % self.ell


def psi_p_decompose(x: GroupMat, psi: Automorphism, p: int) -> tuple[GroupMat, GroupMat]:
    """(u, s) with x = u s = s psi(u), u the p-part and s the p'-part of x psi."""

    ell = psi.order()
    if ell % p == 0:
        raise OrderNotCoprime(f"automorphism order {ell} is divisible by {p}")
    sd = SemidirectProduct(psi)
    g = sd.embed(x)
    k = sd.order(g)
    p_power = 1
    rest = k
    while rest % p == 0:
        rest //= p
        p_power *= p
    # alpha p^a + beta m = 1 mod k; pow(_, -1, 1) is 0
    alpha = pow(p_power, -1, rest)
    beta = pow(rest, -1, p_power)
    s_part = sd.pow(g, alpha * p_power)
    u_part = sd.pow(g, beta * rest)
    if u_part[1] != 0 or s_part[1] != g[1]:
        raise InternalInconsistency("decomposition lost the psi component")
    u, s = u_part[0], s_part[0]
    group = psi.group
    if not (np.array_equal(group.mul(u, s), x) and np.array_equal(group.mul(s, psi(u)), x)):
        raise InternalInconsistency("x != u s or x != s psi(u)")
    return u, s


def is_theta_semisimple(x: GroupMat, f: FieldParams) -> bool:
    """True iff x.theta in PGL_n(q) x| <theta> has order prime to p.

    (x theta)^2 = x theta(x), so the order is 2 * |x theta(x)|.
    """

    y = proj_canon(x @ theta_apply(x))
    return proj_order(y, f) % f.p != 0


def theta_fixed(x: GroupMat, *, projective: bool = False) -> bool:
    return bool(np.array_equal(theta_apply(x, projective=projective), x))

