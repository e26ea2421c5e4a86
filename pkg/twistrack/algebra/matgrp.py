"""Matrices over GF(q) and the groups GL, SL, PGL, PSL built from them.

Matrices are ``galois.FieldArray`` instances of shape (n, n). Projective
elements are stored by their canonical representative: the scalar multiple
whose first nonzero row-major entry is 1.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np
from sympy import factorint

from twistrack.algebra.closure import bfs_closure
from twistrack.algebra.ffield import FieldParams, format_element, generator, parse_element
from twistrack.services.exceptions import (
    InternalInconsistency,
    InvalidInput,
    Singular,
    UnsupportedKind,
)

logger = logging.getLogger(__name__)

GroupMat = np.ndarray  # a FieldArray of shape (n, n)
ProjMat = np.ndarray  # a GroupMat in canonical scalar normalization
Level = Literal["GL", "SL", "PGL", "PSL"]
GeneratorKind = Literal["SL", "GL", "Sp", "SO"]

KEY_DTYPE = np.dtype(">u8")


def identity(f: FieldParams, n: int) -> GroupMat:
    return f.GF.Identity(n)


def zeros(f: FieldParams, n: int) -> GroupMat:
    return f.GF.Zeros((n, n))


def matrix(f: FieldParams, rows: Sequence[Sequence[int]]) -> GroupMat:
    return f.GF(np.asarray(rows, dtype=np.int64) % f.q)


def diag(f: FieldParams, entries: Sequence) -> GroupMat:
    n = len(entries)
    out = zeros(f, n)
    for i, value in enumerate(entries):
        out[i, i] = value
    return out


def unit_matrix(f: FieldParams, n: int, i: int, j: int, value=1) -> GroupMat:
    """The matrix value * e_{ij} (0-based indices)."""

    out = zeros(f, n)
    out[i, j] = value
    return out


def det(x: GroupMat):
    return np.linalg.det(x)


def inverse(x: GroupMat) -> GroupMat:
    if det(x) == 0:
        raise Singular("matrix is not invertible")
    return np.linalg.inv(x)


def is_scalar(x: GroupMat) -> bool:
    first = x[0, 0]
    if first == 0:
        return False
    return bool(np.array_equal(x, first * type(x).Identity(x.shape[0])))


def mat_key(x: GroupMat) -> bytes:
    """Hashable, totally ordered key: big-endian entries in row-major order."""

    return np.asarray(x, dtype=KEY_DTYPE).tobytes()


def from_key(f: FieldParams, n: int, key: bytes) -> GroupMat:
    values = np.frombuffer(key, dtype=KEY_DTYPE).astype(np.int64)
    return f.GF(values.reshape(n, n))


def proj_canon(x: GroupMat) -> ProjMat:
    """Scalar multiple of ``x`` whose first nonzero row-major entry is 1."""

    flat = x.ravel()
    nonzero = np.flatnonzero(np.asarray(flat))
    if len(nonzero) == 0 or det(x) == 0:
        raise Singular("cannot canonicalise a singular matrix")
    lead = flat[nonzero[0]]
    if lead == 1:
        return x
    return x * lead**-1


def psl_membership(x: ProjMat, f: FieldParams) -> bool:
    """True iff some scalar multiple of ``x`` has determinant 1."""

    n = x.shape[0]
    d = math.gcd(n, f.q - 1)
    return bool(det(x) ** ((f.q - 1) // d) == 1)


def pgl_exponent(n: int, f: FieldParams) -> int:
    """An exponent of GL_n(q): lcm of q^k - 1 (k <= n) times the unipotent part."""

    exponent = 1
    for k in range(1, n + 1):
        exponent = math.lcm(exponent, f.q**k - 1)
    unipotent = 1
    while unipotent < n:
        unipotent *= f.p
    return exponent * unipotent


def proj_order(x: ProjMat, f: FieldParams) -> int:
    """Least k >= 1 with x^k scalar."""

    cap = pgl_exponent(x.shape[0], f)
    power = x
    k = 1
    while not is_scalar(power):
        power = power @ x
        k += 1
        if k > cap:
            raise InternalInconsistency(f"projective order exceeds the exponent bound {cap}")
    return k


def linear_order(x: GroupMat, f: FieldParams) -> int:
    """Least k >= 1 with x^k = 1."""

    cap = pgl_exponent(x.shape[0], f) * (f.q - 1)
    ident = identity(f, x.shape[0])
    power = x
    k = 1
    while not np.array_equal(power, ident):
        power = power @ x
        k += 1
        if k > cap:
            raise InternalInconsistency(f"order exceeds the exponent bound {cap}")
    return k


@dataclass(frozen=True)
class MatrixGroup:
    """Multiplication, inversion and keys for one of GL, SL, PGL, PSL."""

    field: FieldParams
    n: int
    level: Level = "GL"

    def __post_init__(self) -> None:
        if self.level not in ("GL", "SL", "PGL", "PSL"):
            raise UnsupportedKind(f"unknown group level {self.level!r}")

    @property
    def projective(self) -> bool:
        return self.level in ("PGL", "PSL")

    @property
    def order_bound(self) -> int:
        return pgl_exponent(self.n, self.field) * (1 if self.projective else self.field.q - 1)

    def generators(self) -> list[GroupMat]:
        kind = "SL" if self.level in ("SL", "PSL") else "GL"
        return [self.lift(g) for g in group_generators(kind, self.n, self.field)]

    def contains(self, x: GroupMat) -> bool:
        if x.shape != (self.n, self.n) or det(x) == 0:
            return False
        if self.level == "SL":
            return bool(det(x) == 1)
        if self.level == "PSL":
            return psl_membership(x, self.field)
        return True

    def __str__(self) -> str:
        return f"{self.level}_{self.n}({self.field.q})"

    def identity(self) -> GroupMat:
        return identity(self.field, self.n)

    def normalize(self, x: GroupMat) -> GroupMat:
        return proj_canon(x) if self.projective else x

    def mul(self, a: GroupMat, b: GroupMat) -> GroupMat:
        return self.normalize(a @ b)

    def inv(self, a: GroupMat) -> GroupMat:
        return self.normalize(inverse(a))

    def key(self, a: GroupMat) -> bytes:
        return mat_key(a)

    def from_key(self, key: bytes) -> GroupMat:
        return from_key(self.field, self.n, key)

    def eq(self, a: GroupMat, b: GroupMat) -> bool:
        return bool(np.array_equal(a, b))

    def is_identity(self, a: GroupMat) -> bool:
        if self.projective:
            return is_scalar(a)
        return bool(np.array_equal(a, self.identity()))

    def order(self, a: GroupMat) -> int:
        if self.projective:
            return proj_order(a, self.field)
        return linear_order(a, self.field)

    def lift(self, a: GroupMat) -> GroupMat:
        """Bring a linear matrix to this level."""

        return self.normalize(a)


def _theta_lie(y: GroupMat, j: GroupMat, j_inv: GroupMat) -> GroupMat:
    return -(j @ y.T @ j_inv)


def _fixed_root_elements(n: int, f: FieldParams) -> list[GroupMat]:
    """exp(X) for X = E + theta(E), E running over simple root vectors and their negatives."""

    from twistrack.algebra.autos import j_matrix, theta_apply

    h = n // 2
    j = j_matrix(n, f)
    j_inv = inverse(j)
    ident = identity(f, n)
    half = f.GF(2) ** -1
    pairs = [(i, i + 1) for i in range(h - 1)] + [(h - 1, h)]
    elements = []
    for i, k in pairs:
        for a, b in ((i, k), (k, i)):
            e = unit_matrix(f, n, a, b)
            x = e + _theta_lie(e, j, j_inv)
            if not np.any(np.asarray(x)):
                continue
            x2 = x @ x
            if np.any(np.asarray(x2 @ x)):
                raise InternalInconsistency("root vector is not nilpotent of degree 3")
            g = ident + x + x2 * half
            if not np.array_equal(theta_apply(g), g):
                raise InternalInconsistency(f"root element for ({a}, {b}) is not theta-fixed")
            elements.append(g)
    return elements


def _torus_pair(f: FieldParams, n: int, i: int, k: int) -> GroupMat:
    g = generator(f)
    entries = [f.one()] * n
    entries[i] = g
    entries[k] = g**-1
    return diag(f, entries)


def group_generators(kind: GeneratorKind, n: int, f: FieldParams) -> list[GroupMat]:
    """A generating set of SL_n(q), GL_n(q), Sp_n(q) (n even) or SO_n(q) (n odd).

    Sp and SO are the theta-fixed subgroups of SL_n(q) for the form given by J_n.
    """

    if n < 2:
        raise UnsupportedKind(f"dimension must be at least 2, got {n}")
    if kind in ("SL", "GL"):
        gens = []
        for i in range(n - 1):
            gens.append(identity(f, n) + unit_matrix(f, n, i, i + 1))
            gens.append(identity(f, n) + unit_matrix(f, n, i + 1, i))
        if f.m > 1:
            gens.extend(_torus_pair(f, n, i, i + 1) for i in range(n - 1))
        if kind == "GL":
            entries = [f.one()] * n
            entries[0] = generator(f)
            gens.append(diag(f, entries))
        return gens
    if kind == "Sp":
        if n % 2:
            raise UnsupportedKind("Sp needs even dimension")
        gens = _fixed_root_elements(n, f)
        if f.m > 1:
            gens.extend(_torus_pair(f, n, i, n - 1 - i) for i in range(n // 2))
        return gens
    if kind == "SO":
        if n % 2 == 0:
            raise UnsupportedKind("SO is the theta-fixed group only in odd dimension")
        gens = _fixed_root_elements(n, f)
        gens.extend(_torus_pair(f, n, i, n - 1 - i) for i in range(n // 2 if f.m > 1 else 1))
        return gens
    raise UnsupportedKind(f"unknown group kind {kind!r}")


def closure(
    gens: Sequence[GroupMat],
    group: MatrixGroup,
    *,
    cap: int,
    workers: int = 1,
) -> dict[bytes, GroupMat]:
    """All products of ``gens`` at the level of ``group``, keyed by :func:`mat_key`."""

    lifted = [group.lift(g) for g in gens]
    return bfs_closure(
        [group.identity()],
        lambda x: (group.mul(x, g) for g in lifted),
        group.key,
        cap=cap,
        workers=workers,
        label=f"{group} closure",
    )


def sl_order(n: int, q: int) -> int:
    order = 1
    for k in range(2, n + 1):
        order *= (q**k - 1) * q ** (k - 1)
    return order


def format_matrix(x: GroupMat, f: FieldParams) -> str:
    return ";".join(",".join(format_element(v, f) for v in row) for row in x)


def parse_matrix(text: str, f: FieldParams) -> GroupMat:
    """Rows separated by ``;``, entries by ``,`` (bare codes or ``p^m:c0,...``)."""

    rows = [row for row in text.strip().split(";") if row.strip()]
    if any(":" in row for row in rows):
        # element serializations themselves contain commas; split on the header
        parsed = []
        for row in rows:
            header = f"{f.p}^{f.m}:"
            parts = [part for part in row.split(header) if part.strip()]
            parsed.append([parse_element(header + part.strip().rstrip(","), f) for part in parts])
    else:
        parsed = [[parse_element(entry, f) for entry in row.split(",")] for row in rows]
    n = len(parsed)
    if n == 0 or any(len(row) != n for row in parsed):
        raise InvalidInput(f"matrix text must describe a square matrix: {text!r}")
    return f.GF([[int(v) for v in row] for row in parsed])


def order_dividing(x: GroupMat, bound: int, *, projective: bool = False) -> int:
    """Order of ``x`` given that it divides ``bound``, by descent over prime divisors."""

    check = is_scalar if projective else (lambda y: bool(np.array_equal(y, type(y).Identity(y.shape[0]))))
    if not check(np.linalg.matrix_power(x, bound)):
        raise InternalInconsistency(f"element order does not divide {bound}")
    order = bound
    for prime in factorint(bound):
        while order % prime == 0 and check(np.linalg.matrix_power(x, order // prime)):
            order //= prime
    return order
