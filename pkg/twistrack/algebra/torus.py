"""Twisted tori T^{F_w} for w = sigma(lambda, eps), the subgroup K_w and the map gamma.

Abstract computations use exponent coordinates. Block j contributes

* eps_j = 0: two coordinates (a, b) modulo N_j = q^lambda_j - 1, one for each
  factor of GF(q^lambda_j)^x x GF(q^lambda_j)^x, with zhat_j = g^(a + b);
* eps_j = 1: one coordinate c modulo q^(2 lambda_j) - 1, with zhat_j = g^c
  where g generates GF(q^lambda_j)^x and is the norm of the chosen generator.

Every GF(q^lambda_j)^x is viewed inside GF(q^L)^x, L = lcm(lambda), through
the exponent s_j = (q^L - 1) / (q^lambda_j - 1).
"""

from __future__ import annotations

import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass, field as dataclass_field
from functools import cached_property, lru_cache, reduce

import numpy as np

from twistrack.algebra.abelian import CyclicProduct, Vector
from twistrack.algebra.autos import j_matrix, theta_apply
from twistrack.algebra.ffield import (
    FieldParams,
    discrete_log,
    extension,
    generator,
    minimal_polynomial,
    q_bracket,
    trace_down,
)
from twistrack.algebra.matgrp import (
    GroupMat,
    MatrixGroup,
    closure,
    det,
    identity,
    inverse,
    mat_key,
    order_dividing,
    pgl_exponent,
)
from twistrack.algebra.weyl import PartitionSignature
from twistrack.services.exceptions import InternalInconsistency, ScaleTooLarge

logger = logging.getLogger(__name__)

REALIZE_VECTOR_LIMIT = 65_536
BRUTE_FORCE_LIMIT = 1_000_000
LOG_ISOMORPHISM_LIMIT = 6561


@dataclass(frozen=True)
class OrderWitness:
    """An element of T^{F_w} (exponent coordinates) whose gamma-image has ``order``."""

    order: int
    vector: Vector


@dataclass(frozen=True)
class TorusModel:
    signature: PartitionSignature
    field: FieldParams

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def d(self) -> int:
        return math.gcd(self.signature.n, self.q - 1)

    @property
    def big_degree(self) -> int:
        return reduce(math.lcm, self.signature.lam, 1)

    @property
    def big_order(self) -> int:
        return self.q**self.big_degree - 1

    def block_order(self, j: int) -> int:
        return self.q ** self.signature.lam[j] - 1

    @cached_property
    def layout(self) -> tuple[tuple[int, ...], ...]:
        """Ambient coordinate indices owned by each block."""

        slots = []
        index = 0
        for e in self.signature.eps:
            width = 1 if e else 2
            slots.append(tuple(range(index, index + width)))
            index += width
        return tuple(slots)

    @cached_property
    def ambient(self) -> CyclicProduct:
        """prod_j F(j) in exponent coordinates."""

        moduli = []
        for j, e in enumerate(self.signature.eps):
            lam = self.signature.lam[j]
            moduli.extend([self.q ** (2 * lam) - 1] if e else [self.q**lam - 1] * 2)
        return CyclicProduct(tuple(moduli))

    def zhat_row(self, j: int) -> list[int]:
        """Coefficients of the zhat_j exponent (modulo N_j) on ambient coordinates."""

        row = [0] * self.ambient.rank
        for index in self.layout[j]:
            row[index] = 1
        return row

    def norm_row(self) -> list[int]:
        """Exponent of prod_j zhat_j^{(lambda_j)_q} in GF(q)^x."""

        return [1] * self.ambient.rank

    @cached_property
    def torus(self) -> tuple[CyclicProduct, list[Vector]]:
        if self.signature.n % 2:
            rank = self.ambient.rank
            gens = [tuple(1 if i == k else 0 for i in range(rank)) for k in range(rank)]
            return self.ambient.canonical(), gens
        return self.ambient.kernel([self.norm_row()], CyclicProduct((self.q - 1,)))

    def gamma_matrix(self) -> list[list[int]]:
        """gamma in GF(q^L)^x coordinates: (d zhat_1, zhat_1 - zhat_2, ...)."""

        scale = [self.big_order // self.block_order(j) for j in range(self.signature.r)]
        rows = [[self.d * scale[0] * c for c in self.zhat_row(0)]]
        for j in range(self.signature.r - 1):
            rows.append(
                [
                    scale[j] * a - scale[j + 1] * b
                    for a, b in zip(self.zhat_row(j), self.zhat_row(j + 1))
                ]
            )
        return rows

    @property
    def gamma_target(self) -> CyclicProduct:
        return CyclicProduct((self.big_order,) * self.signature.r)

    def gamma(self, v: Vector) -> Vector:
        return self.gamma_target.reduce([sum(a * b for a, b in zip(row, v)) for row in self.gamma_matrix()])

    @cached_property
    def image(self) -> tuple[CyclicProduct, list[Vector]]:
        _, gens = self.torus
        images = [self.gamma(g) for g in gens]
        return self.gamma_target.subgroup(images), images

    @cached_property
    def k_subgroup(self) -> tuple[CyclicProduct, list[Vector]]:
        hom = self.gamma_matrix()
        moduli = list(self.gamma_target.moduli)
        if self.signature.n % 2 == 0:
            hom = hom + [self.norm_row()]
            moduli.append(self.q - 1)
        return self.ambient.kernel(hom, CyclicProduct(tuple(moduli)))

    def max_order_witness(self) -> OrderWitness:
        _, gens = self.torus
        _, images = self.image
        coeffs, exponent = self.gamma_target.max_order_combination(images)
        vector = self.ambient.reduce([sum(c * g[i] for c, g in zip(coeffs, gens)) for i in range(self.ambient.rank)])
        if self.gamma_target.element_order(self.gamma(vector)) != exponent:
            raise InternalInconsistency("max-order combination has the wrong order")
        return OrderWitness(order=exponent, vector=vector)


@lru_cache(maxsize=256)
def torus_model(signature: PartitionSignature, f: FieldParams) -> TorusModel:
    return TorusModel(signature, f)


def torus_group(signature: PartitionSignature, f: FieldParams) -> CyclicProduct:
    """T^{F_w} at SL level, in invariant-factor form."""

    return torus_model(signature, f).torus[0].canonical()


def k_subgroup(signature: PartitionSignature, f: FieldParams) -> CyclicProduct:
    return torus_model(signature, f).k_subgroup[0].canonical()


def gamma_image(signature: PartitionSignature, f: FieldParams) -> CyclicProduct:
    return torus_model(signature, f).image[0].canonical()


def zeta_criterion(signature: PartitionSignature, f: FieldParams) -> OrderWitness | None:
    """An element of Im gamma of even order greater than 4, if any."""

    witness = torus_model(signature, f).max_order_witness()
    if witness.order % 2 == 0 and witness.order > 4:
        return witness
    return None


def two_orbits_criterion(signature: PartitionSignature, f: FieldParams) -> OrderWitness | None:
    """An element z of Im gamma with z^4 != 1, if any."""

    witness = torus_model(signature, f).max_order_witness()
    if 4 % witness.order:
        return witness
    return None


@dataclass(frozen=True)
class BruteForceCounts:
    torus_order: int
    k_order: int


def brute_force_counts(signature: PartitionSignature, f: FieldParams) -> BruteForceCounts:
    """|T^{F_w}| and |K_w| by running over the field elements of every F(j)."""

    q, n = f.q, signature.n
    sizes = []
    per_block: list[Counter] = []
    for lam, e in zip(signature.lam, signature.eps):
        small = extension(f, lam)
        sizes.append((q ** (2 * lam) - 1) if e else (q**lam - 1) ** 2)
        if math.prod(sizes) > BRUTE_FORCE_LIMIT or q ** (2 * lam) > LOG_ISOMORPHISM_LIMIT:
            raise ScaleTooLarge(f"brute-force torus count for {signature} over GF({q}) is too large")
        counter: Counter = Counter()
        if e:
            big = extension(f, 2 * lam)
            values = (z ** (1 + q**lam) for z in big.field.units())
            label_ext = big
        else:
            units = list(small.field.units())
            values = (x * y for x in units for y in units)
            label_ext = small
        bracket = q_bracket(lam, q)
        for zhat in values:
            norm = int(label_ext.restrict(zhat**bracket))
            zeta = int(label_ext.restrict(zhat)) if label_ext.contains(zhat) else None
            counter[(norm, zeta)] += 1
        per_block.append(counter)

    torus_total = 0
    k_total = 0
    for combo in itertools.product(*(list(c.items()) for c in per_block)):
        labels = [key for key, _ in combo]
        count = math.prod(mult for _, mult in combo)
        norm = f.one()
        for value, _ in labels:
            norm = norm * f.GF(value)
        if n % 2 == 0 and norm != 1:
            continue
        torus_total += count
        zetas = {zeta for _, zeta in labels}
        if len(zetas) == 1 and None not in zetas:
            zeta = f.GF(zetas.pop())
            if zeta**n == 1:
                k_total += count
    return BruteForceCounts(torus_order=torus_total, k_order=k_total)


def companion(poly: list, f: FieldParams) -> GroupMat:
    """Multiplication by the root in the power basis; ``poly`` is monic little-endian."""

    k = len(poly) - 1
    out = f.GF.Zeros((k, k))
    for i in range(1, k):
        out[i, i - 1] = 1
    for i in range(k):
        out[i, k - 1] = -poly[i]
    return out


@dataclass
class RealizedTorus:
    signature: PartitionSignature
    field: FieldParams
    level: str
    generators: list[GroupMat]
    ambient: CyclicProduct
    ambient_generators: list[GroupMat]
    transform: GroupMat
    elements: dict[bytes, GroupMat] = dataclass_field(default_factory=dict)

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def exponent(self) -> int:
        bound = pgl_exponent(self.signature.n, self.field) * (self.field.q - 1)
        return reduce(math.lcm, (order_dividing(g, bound) for g in self.generators), 1)

    def is_theta_stable(self) -> bool:
        return all(mat_key(theta_apply(g)) in self.elements for g in self.generators)

    def element(self, v: Vector) -> GroupMat:
        """prod_i ambient_generators[i]^v_i."""

        out = identity(self.field, self.signature.n)
        for g, e in zip(self.ambient_generators, self.ambient.reduce(v)):
            if e:
                out = out @ np.linalg.matrix_power(g, e)
        return out


def _block_gram_eps0(lam: int, kappa, f: FieldParams) -> GroupMat:
    gram = f.GF.Zeros((2 * lam, 2 * lam))
    for i in range(lam):
        gram[i, lam + i] = 1
        gram[lam + i, i] = kappa
    return gram


def _block_gram_eps1(lam: int, kappa_sign: int, f: FieldParams) -> tuple[GroupMat, GroupMat]:
    """Companion matrix of a generator of GF(q^2lam) and the form Tr(c x sigma(y))."""

    ext = extension(f, 2 * lam)
    big = ext.field
    g = generator(big)
    size = 2 * lam
    conj_exp = f.q**lam
    c = g ** ((conj_exp + 1) // 2) if kappa_sign < 0 else big.one()
    powers = [g**a for a in range(size)]
    gram = f.GF.Zeros((size, size))
    for a in range(size):
        for b in range(size):
            gram[a, b] = trace_down(c * powers[a] * powers[b] ** conj_exp, ext)
    return companion(minimal_polynomial(g, ext), f), gram


def _isometry(gram: GroupMat, n: int, f: FieldParams, symmetric: bool) -> GroupMat | None:
    """P with P^T gram P = J^-1, built pair by pair from isotropic vectors."""

    vectors = f.GF(np.array(list(itertools.product(range(f.q), repeat=n))[1:], dtype=np.int64))
    target = j_matrix(n, f).T
    columns: dict[int, GroupMat] = {}
    h = n // 2

    def pairing(u: GroupMat) -> GroupMat:
        return vectors @ (gram @ u)

    def complement() -> np.ndarray:
        mask = np.ones(len(vectors), dtype=bool)
        for p in columns.values():
            mask &= np.asarray(pairing(p)) == 0
        return mask

    def form(u: GroupMat, v: GroupMat):
        return u @ gram @ v

    for i in range(h):
        k = n - 1 - i
        mask = complement()
        candidates = vectors[mask]
        self_pair = np.asarray((candidates @ gram * candidates).sum(axis=1)) if len(candidates) else []
        isotropic = [idx for idx, value in enumerate(self_pair) if value == 0]
        if not isotropic:
            return None
        u = candidates[isotropic[0]]
        partners = np.flatnonzero(np.asarray(candidates @ (gram.T @ u)))
        if len(partners) == 0:
            return None
        w = candidates[partners[0]]
        w = w * (target[i, k] / form(u, w))
        if symmetric:
            w = w - u * (form(w, w) / (f.GF(2) * form(u, w)))
        columns[i], columns[k] = u, w
    if n % 2:
        mask = complement()
        remaining = vectors[mask]
        if len(remaining) == 0:
            return None
        v = remaining[0]
        wanted = target[h, h] / form(v, v)
        roots = [x for x in f.units() if x * x == wanted]
        if not roots:
            return None
        columns[h] = v * roots[0]
    transform = f.GF.Zeros((n, n))
    for index, column in columns.items():
        transform[:, index] = column
    if not np.array_equal(transform.T @ gram @ transform, target):
        raise InternalInconsistency("isometry search returned a non-isometry")
    return transform


def _abstract_torus(signature: PartitionSignature, f: FieldParams, line_value) -> tuple[GroupMat, list[GroupMat], list[int]]:
    n = signature.n
    symmetric = n % 2 == 1
    kappa = f.one() if symmetric else -f.one()
    gram = f.GF.Zeros((n, n))
    gens: list[GroupMat] = []
    moduli: list[int] = []
    offset = 0
    for lam, e in zip(signature.lam, signature.eps):
        if e:
            comp, block = _block_gram_eps1(lam, 1 if symmetric else -1, f)
            size = 2 * lam
            gram[offset : offset + size, offset : offset + size] = block
            g = identity(f, n)
            g[offset : offset + size, offset : offset + size] = comp
            gens.append(g)
            moduli.append(f.q ** (2 * lam) - 1)
        else:
            small = extension(f, lam)
            comp = companion(minimal_polynomial(generator(small.field), small), f)
            gram[offset : offset + 2 * lam, offset : offset + 2 * lam] = _block_gram_eps0(lam, kappa, f)
            left = identity(f, n)
            left[offset : offset + lam, offset : offset + lam] = comp
            right = identity(f, n)
            right[offset + lam : offset + 2 * lam, offset + lam : offset + 2 * lam] = comp.T
            gens.extend([left, right])
            moduli.extend([f.q**lam - 1] * 2)
        offset += 2 * lam
    if symmetric:
        gram[n - 1, n - 1] = line_value
        line = identity(f, n)
        line[n - 1, n - 1] = generator(f)
        gens.append(line)
        moduli.append(f.q - 1)
    return gram, gens, moduli


@lru_cache(maxsize=64)
def torus_realize(signature: PartitionSignature, f: FieldParams, level: str = "SL", cap: int = 2_000_000) -> RealizedTorus:
    """Matrices in GL_n(q) generating a theta-stable torus of type ``signature``.

    The abstract torus acts on blocks carrying a form of the same type as
    J^-1; an isometry found by search carries it into the standard
    coordinates, where theta is the adjoint-inverse for J^-1.
    """

    n = signature.n
    if f.q**n > REALIZE_VECTOR_LIMIT:
        raise ScaleTooLarge(f"realizing a torus in GL_{n}({f.q}) exceeds the search limit")
    transform = None
    for line_value in (f.one(), generator(f)):
        gram, abstract_gens, moduli = _abstract_torus(signature, f, line_value)
        transform = _isometry(gram, n, f, symmetric=n % 2 == 1)
        if transform is not None or n % 2 == 0:
            break
    if transform is None:
        raise InternalInconsistency(f"no isometry onto the J-form for {signature}")
    back = inverse(transform)
    ambient_gens = [back @ g @ transform for g in abstract_gens]
    ambient = CyclicProduct(tuple(moduli))

    if level == "SL":
        logs = [discrete_log(det(g), f) for g in ambient_gens]
        _, kernel_gens = ambient.kernel([logs], CyclicProduct((f.q - 1,)))
        realized = RealizedTorus(signature, f, level, [], ambient, ambient_gens, transform)
        gens = [realized.element(v) for v in kernel_gens]
        realized.generators = [g for g in gens if not np.array_equal(g, identity(f, n))]
    else:
        realized = RealizedTorus(signature, f, level, list(ambient_gens), ambient, ambient_gens, transform)
    group = MatrixGroup(f, n, "GL")
    realized.elements = closure(realized.generators, group, cap=cap)
    logger.debug("Realized %s torus for %s over %s: %d elements", level, signature, f, realized.order)
    return realized


def certify_realization(signature: PartitionSignature, f: FieldParams) -> bool:
    """Order and exponent of the realized SL torus against the presentation."""

    realized = torus_realize(signature, f, "SL")
    presented = torus_group(signature, f)
    return realized.order == presented.order and realized.exponent == presented.exponent


def isomorphism_by_logs(signature: PartitionSignature, f: FieldParams) -> dict[bytes, Vector]:
    """Matrix key -> exponent vector for the GL-level realized torus."""

    if any(f.q ** (2 * lam) > LOG_ISOMORPHISM_LIMIT for lam in signature.lam):
        raise ScaleTooLarge("explicit isomorphism needs q^(2 lambda) <= 6561")
    realized = torus_realize(signature, f, "GL")
    mapping: dict[bytes, Vector] = {}
    for v in itertools.product(*(range(d) for d in realized.ambient.moduli)):
        key = mat_key(realized.element(v))
        if key in mapping:
            raise InternalInconsistency(f"exponent vectors {mapping[key]} and {v} give the same matrix")
        mapping[key] = tuple(v)
    if len(mapping) != realized.order:
        raise InternalInconsistency("realized torus and its presentation differ in size")
    return mapping
