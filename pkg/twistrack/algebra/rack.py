"""Racks from twisted conjugacy classes and the type D test."""

from __future__ import annotations

import logging
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field

import numpy as np

from twistrack.algebra.abelian import CyclicProduct
from twistrack.algebra.autos import (
    Automorphism,
    SemidirectProduct,
    identity_automorphism,
    inner,
    twisted_act,
)
from twistrack.algebra.closure import bfs_closure
from twistrack.algebra.matgrp import GroupMat, MatrixGroup
from twistrack.services.exceptions import BudgetExceeded, NotInvolution

logger = logging.getLogger(__name__)


def rack_op(y: GroupMat, z: GroupMat, psi: Automorphism) -> GroupMat:
    """y |> z = y psi(z y^-1)."""

    group = psi.group
    return group.mul(y, psi(group.mul(z, group.inv(y))))


def _with_inverses(gens: Sequence[GroupMat], group: MatrixGroup) -> list[GroupMat]:
    out = [group.lift(g) for g in gens]
    out += [group.inv(g) for g in out]
    return out


@dataclass(eq=False)
class TwistedOrbit:
    """The orbit of ``base`` under g . x . psi(g)^-1 for g in <generators>."""

    psi: Automorphism
    base: GroupMat
    elements: dict[bytes, GroupMat]
    generators: list[GroupMat] = field(default_factory=list)

    @property
    def group(self) -> MatrixGroup:
        return self.psi.group

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[GroupMat]:
        return iter(self.elements.values())

    def __contains__(self, x: GroupMat) -> bool:
        return self.group.key(self.group.normalize(x)) in self.elements

    def keys(self) -> list[bytes]:
        return list(self.elements)


def orbit_enumerate(
    x: GroupMat,
    gens: Sequence[GroupMat],
    psi: Automorphism,
    *,
    cap: int,
    workers: int = 1,
) -> TwistedOrbit:
    group = psi.group
    actors = _with_inverses(gens, group)
    base = group.normalize(x)
    elements = bfs_closure(
        [base],
        lambda y: (twisted_act(g, y, psi) for g in actors),
        group.key,
        cap=cap,
        workers=workers,
        label=f"orbit in {group}",
    )
    logger.debug("Twisted orbit under %s in %s has %d elements", psi, group, len(elements))
    return TwistedOrbit(psi=psi, base=base, elements=elements, generators=list(gens))


def typeD_sides(r: GroupMat, s: GroupMat, psi: Automorphism) -> tuple[GroupMat, GroupMat]:
    """(r psi(s) psi^2(r) psi^3(s), s psi(r) psi^2(s) psi^3(r))."""

    group = psi.group
    r_images = [r]
    s_images = [s]
    for _ in range(3):
        r_images.append(psi(r_images[-1]))
        s_images.append(psi(s_images[-1]))
    left = group.identity()
    right = group.identity()
    for i in range(4):
        left = group.mul(left, r_images[i] if i % 2 == 0 else s_images[i])
        right = group.mul(right, s_images[i] if i % 2 == 0 else r_images[i])
    return group.normalize(left), group.normalize(right)


def typeD_condition(r: GroupMat, s: GroupMat, psi: Automorphism) -> bool:
    left, right = typeD_sides(r, s, psi)
    return not np.array_equal(left, right)


def psi_closed_generators(elements: Sequence[GroupMat], psi: Automorphism) -> list[GroupMat]:
    """``elements`` together with all their psi-images, without repeats."""

    group = psi.group
    seen: dict[bytes, GroupMat] = {}
    for x in elements:
        image = group.normalize(x)
        for _ in range(psi.order()):
            seen.setdefault(group.key(image), image)
            image = psi(image)
    return list(seen.values())


class _LazyOrbit:
    """Layer-by-layer twisted orbit, for early collision detection."""

    def __init__(self, base: GroupMat, actors: Sequence[GroupMat], psi: Automorphism, cap: int):
        self.psi = psi
        self.actors = actors
        self.cap = cap
        group = psi.group
        self.seen = {group.key(base): base}
        self.frontier = [base]

    @property
    def done(self) -> bool:
        return not self.frontier

    def advance(self) -> None:
        group = self.psi.group
        fresh = []
        for y in self.frontier:
            for g in self.actors:
                image = twisted_act(g, y, self.psi)
                key = group.key(image)
                if key not in self.seen:
                    self.seen[key] = image
                    fresh.append(image)
        if len(self.seen) > self.cap:
            raise BudgetExceeded(f"subrack exceeds cap {self.cap}", limit=self.cap)
        self.frontier = fresh

    def finish(self) -> None:
        while not self.done:
            self.advance()


@dataclass
class TypeDWitness:
    r: GroupMat
    s: GroupMat
    subrack_r: list[bytes]
    subrack_s: list[bytes]
    left: GroupMat
    right: GroupMat

    @property
    def sizes(self) -> tuple[int, int]:
        return len(self.subrack_r), len(self.subrack_s)


@dataclass
class TypeDScan:
    witness: TypeDWitness | None
    pairs_tried: int
    exhaustive: bool
    skipped: int = 0


def disjoint_subracks(
    r: GroupMat,
    s: GroupMat,
    psi: Automorphism,
    *,
    cap: int,
) -> tuple[dict[bytes, GroupMat], dict[bytes, GroupMat]] | None:
    """The orbits of r and s under the psi-stable closure of <r, s>, if disjoint."""

    group = psi.group
    actors = _with_inverses(psi_closed_generators([r, s], psi), group)
    orbit_r = _LazyOrbit(group.normalize(r), actors, psi, cap)
    orbit_s = _LazyOrbit(group.normalize(s), actors, psi, cap)
    key_r = group.key(group.normalize(r))
    key_s = group.key(group.normalize(s))
    while not (orbit_r.done or orbit_s.done):
        if key_s in orbit_r.seen or key_r in orbit_s.seen:
            return None
        orbit_r.advance()
        orbit_s.advance()
    if key_s in orbit_r.seen or key_r in orbit_s.seen:
        return None
    orbit_r.finish()
    orbit_s.finish()
    return orbit_r.seen, orbit_s.seen


def typeD_scan(
    pairs: Iterable[tuple[GroupMat, GroupMat]],
    psi: Automorphism,
    *,
    pair_budget: int,
    subgroup_cap: int,
) -> TypeDScan:
    """Test candidate pairs in order; stop at the first type D witness."""

    tried = 0
    skipped = 0
    for r, s in pairs:
        if tried >= pair_budget:
            return TypeDScan(None, tried, exhaustive=False, skipped=skipped)
        tried += 1
        left, right = typeD_sides(r, s, psi)
        if np.array_equal(left, right):
            continue
        try:
            subracks = disjoint_subracks(r, s, psi, cap=subgroup_cap)
        except BudgetExceeded:
            skipped += 1
            continue
        if subracks is None:
            continue
        rack_r, rack_s = subracks
        logger.info("Type D witness after %d pairs (subracks %d, %d)", tried, len(rack_r), len(rack_s))
        witness = TypeDWitness(r, s, sorted(rack_r), sorted(rack_s), left, right)
        return TypeDScan(witness, tried, exhaustive=False, skipped=skipped)
    return TypeDScan(None, tried, exhaustive=skipped == 0, skipped=skipped)


def _orbit_pairs(
    orbit: TwistedOrbit,
    probes: Sequence[GroupMat],
    fix_base: bool,
) -> Iterator[tuple[GroupMat, GroupMat]]:
    group = orbit.group
    base_key = group.key(orbit.base)
    emitted: set[bytes] = set()
    for g in probes:
        image = twisted_act(group.lift(g), orbit.base, orbit.psi)
        key = group.key(image)
        if key != base_key and key not in emitted:
            emitted.add(key)
            yield orbit.base, image
    if fix_base:
        for key, s in orbit.elements.items():
            if key != base_key and key not in emitted:
                yield orbit.base, s
        return
    keys = orbit.keys()
    for i, key_r in enumerate(keys):
        for key_s in keys[i + 1 :]:
            if key_r == base_key and key_s in emitted:
                continue
            yield orbit.elements[key_r], orbit.elements[key_s]


def typeD_search_scan(
    orbit: TwistedOrbit,
    *,
    pair_budget: int,
    subgroup_cap: int,
    probes: Sequence[GroupMat] | None = None,
    fix_base: bool = False,
) -> TypeDScan:
    """Pairs (base, g . base) for the probe set first, then all pairs by key.

    With ``fix_base`` only pairs (base, s) are scanned; twisted conjugation
    moves any witness pair to one of these.
    """

    probes = orbit.generators if probes is None else probes
    return typeD_scan(
        _orbit_pairs(orbit, probes, fix_base),
        orbit.psi,
        pair_budget=pair_budget,
        subgroup_cap=subgroup_cap,
    )


def typeD_search(
    orbit: TwistedOrbit,
    *,
    pair_budget: int,
    subgroup_cap: int,
    probes: Sequence[GroupMat] | None = None,
    fix_base: bool = False,
) -> TypeDWitness | None:
    return typeD_search_scan(
        orbit,
        pair_budget=pair_budget,
        subgroup_cap=subgroup_cap,
        probes=probes,
        fix_base=fix_base,
    ).witness


def typeD_from_candidates(
    r: GroupMat,
    candidates: Iterable[GroupMat],
    psi: Automorphism,
    *,
    pair_budget: int,
    subgroup_cap: int,
) -> TypeDScan:
    """Scan pairs (r, s) for s in ``candidates`` without enumerating the class."""

    return typeD_scan(
        ((r, s) for s in candidates),
        psi,
        pair_budget=pair_budget,
        subgroup_cap=subgroup_cap,
    )


def involution_typeD(
    s: GroupMat,
    gens: Sequence[GroupMat],
    group: MatrixGroup,
    *,
    cap: int,
) -> GroupMat | None:
    """First r in the class of the involution s with |rs| even and greater than 4."""

    s = group.normalize(s)
    if group.is_identity(s) or not group.is_identity(group.mul(s, s)):
        raise NotInvolution("expected an element of order 2")
    orbit = orbit_enumerate(s, gens, identity_automorphism(group), cap=cap)
    for r in orbit:
        order = group.order(group.mul(r, s))
        if order % 2 == 0 and order > 4:
            return r
    return None


def abelian_twisted_orbit(group: CyclicProduct, psi_matrix: Sequence[Sequence[int]]) -> CyclicProduct:
    """Image of b -> b psi(b)^-1 on an abelian group, ``psi_matrix`` acting on exponents."""

    k = group.rank
    gamma = [[(1 if i == j else 0) - int(psi_matrix[i][j]) for j in range(k)] for i in range(k)]
    return group.image(gamma)


def transport_right(orbit: TwistedOrbit, x: GroupMat) -> TwistedOrbit:
    """Carry O_g under Ad(x) . psi onto O_{gx} under psi by right multiplication."""

    group = orbit.group
    x = group.lift(x)
    psi = inner(group, group.inv(x)).compose(orbit.psi)
    moved = [group.mul(y, x) for y in orbit]
    elements = dict(sorted(((group.key(y), y) for y in moved), key=lambda item: item[0]))
    return TwistedOrbit(psi, group.mul(orbit.base, x), elements, list(orbit.generators))


def semidirect_embed(y: GroupMat, psi: Automorphism) -> tuple[GroupMat, int]:
    """y -> y psi in H x| <psi>; carries |> to conjugation."""

    return SemidirectProduct(psi).embed(y)


def conjugate_in_semidirect(y: GroupMat, z: GroupMat, psi: Automorphism) -> tuple[GroupMat, int]:
    sd = SemidirectProduct(psi)
    a = sd.embed(y)
    return sd.mul(sd.mul(a, sd.embed(z)), sd.inv(a))


def _inner_step(actors: Sequence[GroupMat], psi: Automorphism):
    """z -> a |> z and its inverse for a in ``actors``, as conjugation by a psi."""

    sd = SemidirectProduct(psi)
    embedded = [sd.embed(psi.group.normalize(a)) for a in actors]
    pairs = [(a, sd.inv(a)) for a in embedded] + [(sd.inv(a), a) for a in embedded]

    def step(z: GroupMat) -> Iterator[GroupMat]:
        point = sd.embed(z)
        for c, c_inv in pairs:
            image, _ = sd.mul(sd.mul(c, point), c_inv)
            yield image

    return step


def inner_orbit(
    y: GroupMat,
    actors: Sequence[GroupMat],
    psi: Automorphism,
    *,
    cap: int,
    workers: int = 1,
) -> dict[bytes, GroupMat]:
    """Orbit of y under the rack-inner group generated by the left translations of ``actors``."""

    group = psi.group
    return bfs_closure(
        [group.normalize(y)],
        _inner_step(actors, psi),
        group.key,
        cap=cap,
        workers=workers,
        label=f"inner orbit in {group}",
    )


def inner_subracks(
    r: GroupMat,
    s: GroupMat,
    psi: Automorphism,
    *,
    cap: int,
) -> tuple[dict[bytes, GroupMat], dict[bytes, GroupMat]] | None:
    """The orbits of r and s under Inn of the subrack generated by r and s, if distinct.

    Both are orbits of one group, so they are either equal or disjoint.
    """

    group = psi.group
    orbit_r = inner_orbit(r, [r, s], psi, cap=cap)
    if group.key(group.normalize(s)) in orbit_r:
        return None
    return orbit_r, inner_orbit(s, [r, s], psi, cap=cap)
