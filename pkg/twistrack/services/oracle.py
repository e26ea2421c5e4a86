"""Brute force at desk scale: whole groups, all twisted classes, exhaustive type D."""

from __future__ import annotations

import itertools
import json
import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np

from twistrack import __version__
from twistrack.algebra.autos import (
    Automorphism,
    SemidirectProduct,
    is_theta_semisimple,
    theta,
    theta_fixed,
)
from twistrack.algebra.closure import bfs_closure
from twistrack.algebra.ffield import FieldParams, field_of_order
from twistrack.algebra.matgrp import (
    GroupMat,
    MatrixGroup,
    closure,
    format_matrix,
    group_generators,
    proj_canon,
)
from twistrack.algebra.rack import (
    TwistedOrbit,
    TypeDWitness,
    inner_subracks,
    orbit_enumerate,
    typeD_sides,
)
from twistrack.algebra.torus import torus_realize
from twistrack.algebra.weyl import conjugacy_reps
from twistrack.config import Settings, get_settings
from twistrack.schemas.verify import Theorem51Report
from twistrack.services.exceptions import (
    BudgetExceeded,
    InternalInconsistency,
    ServiceError,
    UnsupportedKind,
)

logger = logging.getLogger(__name__)

GroupKind = Literal["GL", "SL", "PGL", "PSL", "Sp", "SO"]
EXHAUSTIVE_PAIR_LIMIT = 5000
CACHE_SAMPLE = 64


@dataclass
class GroupElements:
    kind: str
    group: MatrixGroup
    generators: list[GroupMat]
    elements: dict[bytes, GroupMat]

    def __len__(self) -> int:
        return len(self.elements)


@dataclass
class ExhaustiveResult:
    is_type_d: bool
    witness: TypeDWitness | None
    pairs_tried: int


def _group_for(kind: str, n: int, f: FieldParams) -> tuple[MatrixGroup, list[GroupMat]]:
    if kind in ("GL", "SL", "PGL", "PSL"):
        group = MatrixGroup(f, n, kind)
        return group, group.generators()
    if kind in ("Sp", "SO"):
        group = MatrixGroup(f, n, "SL")
        return group, group_generators(kind, n, f)
    raise UnsupportedKind(f"unknown group kind {kind!r}")


def _cache_path(cache_dir: Path, kind: str, n: int, q: int) -> Path:
    return cache_dir / f"{kind}_n{n}_q{q}.json"


def _member(kind: str, group: MatrixGroup, x: GroupMat) -> bool:
    if not group.contains(x):
        return False
    if group.projective and not np.array_equal(proj_canon(x), x):
        return False
    if kind in ("Sp", "SO"):
        return theta_fixed(x)
    return True


def _load_cached(path: Path, kind: str, group: MatrixGroup, seed: int) -> dict[bytes, GroupMat] | None:
    try:
        data = json.loads(path.read_text())
    except (OSError, ValueError):
        return None
    header = data.get("header", {})
    keys = data.get("keys", [])
    if header.get("group") != f"{kind}_{group.n}({group.field.q})" or header.get("modulus") != group.field.modulus_text:
        return None
    if header.get("code_version") != __version__ or header.get("size") != len(keys):
        return None
    rng = np.random.default_rng(seed)
    sample = rng.choice(len(keys), size=min(CACHE_SAMPLE, len(keys)), replace=False) if keys else []
    for index in sample:
        if not _member(kind, group, group.from_key(bytes.fromhex(keys[index]))):
            logger.warning("Cache %s failed membership check; recomputing", path)
            return None
    logger.debug("Cache hit for %s (%d elements)", path, len(keys))
    return {bytes.fromhex(k): group.from_key(bytes.fromhex(k)) for k in keys}


def _store(path: Path, kind: str, group: MatrixGroup, elements: Mapping[bytes, GroupMat]) -> None:
    header = {
        "group": f"{kind}_{group.n}({group.field.q})",
        "modulus": group.field.modulus_text,
        "code_version": __version__,
        "size": len(elements),
    }
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps({"header": header, "keys": [k.hex() for k in sorted(elements)]}))
    except OSError as exc:
        logger.warning("Could not write group cache %s: %s", path, exc)


def enumerate_group(
    kind: GroupKind,
    n: int,
    q: int,
    *,
    cap: int,
    workers: int = 1,
    cache_dir: Path | None = None,
    seed: int = 0,
) -> GroupElements:
    """Full closure of the standard generators, optionally cached on disk."""

    f = field_of_order(q)
    group, gens = _group_for(kind, n, f)
    path = _cache_path(cache_dir, kind, n, q) if cache_dir is not None else None
    if path is not None and path.exists():
        cached = _load_cached(path, kind, group, seed)
        if cached is not None:
            return GroupElements(kind, group, gens, cached)
    elements = closure(gens, group, cap=cap, workers=workers)
    logger.info("Enumerated %s_%d(%d): %d elements", kind, n, q, len(elements))
    if path is not None:
        _store(path, kind, group, elements)
    return GroupElements(kind, group, gens, elements)


def twisted_class_partition(
    elements: Mapping[bytes, GroupMat],
    gens: Sequence[GroupMat],
    psi: Automorphism,
    *,
    cap: int,
    workers: int = 1,
) -> list[TwistedOrbit]:
    """Orbits of h ._psi x = h x psi(h)^-1 for h in <gens>, in order of their least key."""

    remaining = dict(elements)
    orbits: list[TwistedOrbit] = []
    for key in sorted(elements):
        if key not in remaining:
            continue
        orbit = orbit_enumerate(remaining[key], gens, psi, cap=cap, workers=workers)
        for member in orbit.keys():
            if remaining.pop(member, None) is None and member not in elements:
                raise InternalInconsistency(f"twisted orbit of {key.hex()} leaves the enumerated set")
        orbits.append(orbit)
    total = sum(len(o) for o in orbits)
    if total != len(elements):
        raise InternalInconsistency(f"orbit sizes sum to {total}, expected {len(elements)}")
    logger.debug("Partitioned %d elements into %d twisted classes", total, len(orbits))
    return orbits


def torus_union(n: int, f: FieldParams) -> set[bytes]:
    """PGL keys of every realized theta-stable torus, one per class of W^theta."""

    group = MatrixGroup(f, n, "PGL")
    keys: set[bytes] = set()
    for signature, _ in conjugacy_reps(n):
        realized = torus_realize(signature, f, "GL")
        keys.update(group.key(proj_canon(x)) for x in realized.elements.values())
    return keys


def theorem51_check(n: int, q: int, *, cap: int, workers: int = 1, cache_dir: Path | None = None) -> Theorem51Report:
    """Every theta-semisimple PSL-twisted class of PGL_n(q) meets a realized torus."""

    f = field_of_order(q)
    pgl = enumerate_group("PGL", n, q, cap=cap, workers=workers, cache_dir=cache_dir)
    psi = theta(pgl.group)
    sl_gens = MatrixGroup(f, n, "PSL").generators()
    orbits = twisted_class_partition(pgl.elements, sl_gens, psi, cap=cap, workers=workers)
    tori = torus_union(n, f)
    semisimple = 0
    uncovered = []
    for orbit in orbits:
        if not is_theta_semisimple(orbit.base, f):
            continue
        semisimple += 1
        if not any(key in tori for key in orbit.elements):
            uncovered.append(format_matrix(orbit.base, f))
    logger.info("Coverage n=%d q=%d: %d of %d theta-semisimple classes meet a torus", n, q, semisimple - len(uncovered), semisimple)
    return Theorem51Report(
        n=n,
        q=q,
        covered=not uncovered,
        classes=len(orbits),
        semisimple_classes=semisimple,
        uncovered=uncovered,
    )


def _pairs(keys: list[bytes], base: bytes | None):
    if base is not None:
        return ((base, k) for k in keys if k != base)
    return itertools.combinations(keys, 2)


def exhaustive_typeD(
    elements: Mapping[bytes, GroupMat],
    psi: Automorphism,
    *,
    base: GroupMat | None = None,
    subgroup_cap: int,
    limit: int = EXHAUSTIVE_PAIR_LIMIT,
) -> ExhaustiveResult:
    """Decide type D for a rack given by its elements.

    The subracks are orbits of the group generated by the left translations
    of r and s, i.e. conjugacy classes under <r psi, s psi> in H x| <psi>,
    so a negative answer holds for every psi.

    With ``base`` the rack is a single twisted class through ``base`` and
    only pairs (base, s) are scanned; twisted conjugation carries any pair
    there. Otherwise every unordered pair is tested.
    """

    if len(elements) > limit:
        raise BudgetExceeded(f"rack of size {len(elements)} exceeds the exhaustive limit {limit}", limit=limit)
    group = psi.group
    keys = sorted(elements)
    base_key = group.key(group.normalize(base)) if base is not None else None
    tried = 0
    for key_r, key_s in _pairs(keys, base_key):
        tried += 1
        r, s = elements[key_r], elements[key_s]
        left, right = typeD_sides(r, s, psi)
        if np.array_equal(left, right):
            continue
        subracks = inner_subracks(r, s, psi, cap=subgroup_cap)
        if subracks is None:
            continue
        rack_r, rack_s = subracks
        witness = TypeDWitness(r, s, sorted(rack_r), sorted(rack_s), left, right)
        logger.info("Exhaustive type D witness after %d pairs", tried)
        return ExhaustiveResult(True, witness, tried)
    return ExhaustiveResult(False, None, tried)


def semidirect_coset_classes(
    elements: Mapping[bytes, GroupMat],
    gens: Sequence[GroupMat],
    psi: Automorphism,
    *,
    cap: int,
) -> int:
    """Conjugacy classes of H x| <psi> inside the coset H psi, counted in the semidirect product."""

    sd = SemidirectProduct(psi)
    group = psi.group
    conjugators = [sd.embed(group.identity())]
    conjugators += [(group.lift(g), 0) for g in gens]
    conjugators += [sd.inv(c) for c in conjugators]
    remaining = set(elements)
    count = 0
    for key in sorted(elements):
        if key not in remaining:
            continue
        start = sd.embed(elements[key])
        orbit = bfs_closure(
            [start],
            lambda a: (sd.mul(sd.mul(c, a), sd.inv(c)) for c in conjugators),
            sd.key,
            cap=cap,
            label="semidirect class",
        )
        for y, _ in orbit.values():
            remaining.discard(group.key(y))
        count += 1
    return count


class OracleService:
    def __init__(self, settings: Settings | None = None) -> None:
        self._settings = settings or get_settings()

    def _run(self, label: str, func, *args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ServiceError:
            raise
        except Exception as exc:
            logger.exception("Unexpected error during %s", label)
            raise ServiceError(f"Failed to run {label}", cause=exc)

    def enumerate(self, kind: GroupKind, n: int, q: int) -> GroupElements:
        s = self._settings
        return self._run(
            "group enumeration",
            enumerate_group,
            kind,
            n,
            q,
            cap=s.group_cap,
            workers=s.workers,
            cache_dir=s.cache_dir,
            seed=s.seed,
        )

    def partition(self, kind: GroupKind, n: int, q: int, twist: str = "theta") -> list[TwistedOrbit]:
        group = self.enumerate(kind, n, q)
        psi = theta(group.group) if twist == "theta" else Automorphism(group.group)
        return self._run(
            "twisted class partition",
            twisted_class_partition,
            group.elements,
            group.generators,
            psi,
            cap=self._settings.orbit_cap,
            workers=self._settings.workers,
        )

    def theorem51(self, n: int, q: int) -> Theorem51Report:
        s = self._settings
        return self._run("torus coverage", theorem51_check, n, q, cap=s.group_cap, workers=s.workers, cache_dir=s.cache_dir)

    def exhaustive(self, orbit: TwistedOrbit) -> ExhaustiveResult:
        return self._run(
            "exhaustive type D",
            exhaustive_typeD,
            orbit.elements,
            orbit.psi,
            base=orbit.base,
            subgroup_cap=self._settings.subgroup_cap,
        )

    def class_count_check(self, n: int, q: int) -> tuple[int, int]:
        """(theta-twisted classes of PSL_n(q), classes of PSL_n(q) x| <theta> in the outer coset)."""

        group = self.enumerate("PSL", n, q)
        psi = theta(group.group)
        twisted = len(self.partition("PSL", n, q))
        coset = self._run(
            "semidirect class count",
            semidirect_coset_classes,
            group.elements,
            group.generators,
            psi,
            cap=self._settings.orbit_cap,
        )
        return twisted, coset
