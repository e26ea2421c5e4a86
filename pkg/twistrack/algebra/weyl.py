"""The theta-fixed Weyl group W^theta = S_h x| Z_2^h inside S_n.

Permutations are :class:`sympy.combinatorics.Permutation` objects on
{0, ..., n-1}; points are printed 1-based. Products are composed right to
left, as functions: ``compose(a, b)(i) == a(b(i))``.
"""

from __future__ import annotations

import logging
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from functools import reduce

from sympy.combinatorics import Permutation
from sympy.utilities.iterables import partitions

from twistrack.algebra.closure import bfs_closure
from twistrack.services.exceptions import InvalidInput, InvalidSignature, TooLarge

logger = logging.getLogger(__name__)

MAX_SYMMETRIC_DEGREE = 9


def compose(*perms: Permutation) -> Permutation:
    """Right-to-left product: the last factor acts first."""

    # sympy multiplies left to right
    return reduce(lambda acc, p: acc * p, reversed(perms[:-1]), perms[-1]) if perms else Permutation([])


def cycle(points: Sequence[int], n: int) -> Permutation:
    """The cycle (points[0] points[1] ...) on 1-based points."""

    if len(points) < 2:
        return Permutation(list(range(n)))
    return Permutation([[p - 1 for p in points]], size=n)


def format_perm(perm: Permutation) -> str:
    cycles = [c for c in perm.cyclic_form if len(c) > 1]
    if not cycles:
        return "()"
    return "".join("(" + ",".join(str(i + 1) for i in c) + ")" for c in cycles)


@dataclass(frozen=True)
class PartitionSignature:
    n: int
    lam: tuple[int, ...]
    eps: tuple[int, ...]

    def __post_init__(self) -> None:
        h = self.n // 2
        if self.n < 2:
            raise InvalidSignature(f"n must be at least 2, got {self.n}")
        if sum(self.lam) != h or any(part < 1 for part in self.lam):
            raise InvalidSignature(f"lambda {self.lam} is not a partition of {h}")
        if any(a < b for a, b in zip(self.lam, self.lam[1:])):
            raise InvalidSignature(f"lambda {self.lam} is not weakly decreasing")
        if len(self.eps) != len(self.lam) or any(e not in (0, 1) for e in self.eps):
            raise InvalidSignature(f"eps {self.eps} does not match lambda {self.lam}")
        if not eps_admissible(self.lam, self.eps):
            raise InvalidSignature(f"eps {self.eps} is not admissible for lambda {self.lam}")

    @property
    def h(self) -> int:
        return self.n // 2

    @property
    def r(self) -> int:
        return len(self.lam)

    @property
    def block_ends(self) -> tuple[int, ...]:
        """i_1 < i_2 < ... < i_r = h (1-based)."""

        ends = []
        total = 0
        for part in self.lam:
            total += part
            ends.append(total)
        return tuple(ends)

    def text(self) -> str:
        return "lambda=" + ",".join(map(str, self.lam)) + ";eps=" + ",".join(map(str, self.eps))

    def __str__(self) -> str:
        return f"n={self.n} {self.text()}"


def eps_admissible(lam: Sequence[int], eps: Sequence[int]) -> bool:
    return all(
        not (lam[j] == lam[j + 1] and eps[j] == 0 and eps[j + 1] != 0) for j in range(len(lam) - 1)
    )


def parse_signature(text: str, n: int) -> PartitionSignature:
    """Parse ``lambda=2,1;eps=1,0``."""

    fields: dict[str, tuple[int, ...]] = {}
    for part in text.split(";"):
        name, _, values = part.partition("=")
        try:
            fields[name.strip()] = tuple(int(v) for v in values.split(",") if v.strip())
        except ValueError as exc:
            raise InvalidSignature(f"cannot parse signature {text!r}", cause=exc)
    if "lambda" not in fields or "eps" not in fields:
        raise InvalidSignature(f"signature needs lambda= and eps=: {text!r}")
    return PartitionSignature(n, fields["lambda"], fields["eps"])


def longest_element(n: int) -> Permutation:
    """w0 = (1, n)(2, n-1)...; the middle point is fixed for odd n."""

    if n < 2:
        raise InvalidInput(f"n must be at least 2, got {n}")
    return Permutation([n - 1 - i for i in range(n)])


def theta_perm(perm: Permutation, n: int) -> Permutation:
    w0 = longest_element(n)
    return compose(w0, perm, w0)


def commutes_with_w0(perm: Permutation, n: int) -> bool:
    w0 = longest_element(n)
    return compose(w0, perm) == compose(perm, w0)


def admissible_eps(lam: Sequence[int]) -> list[tuple[int, ...]]:
    """All admissible sign vectors for ``lam`` in lexicographic order."""

    r = len(lam)
    out = []
    for code in range(2**r):
        eps = tuple((code >> (r - 1 - i)) & 1 for i in range(r))
        if eps_admissible(lam, eps):
            out.append(eps)
    return out


def partitions_of(h: int) -> list[tuple[int, ...]]:
    """Partitions of h as weakly decreasing tuples, largest parts first."""

    found = []
    for counts in partitions(h):
        parts = sorted((part for part, mult in counts.items() for _ in range(mult)), reverse=True)
        found.append(tuple(parts))
    return sorted(found, reverse=True)


def sigma(signature: PartitionSignature) -> Permutation:
    """Product over blocks of c_j theta(c_j) s_{i_j, n+1-i_j}^eps_j."""

    n = signature.n
    factors = []
    start = 1
    for end, e in zip(signature.block_ends, signature.eps):
        c = cycle(list(range(start, end + 1)), n)
        block = compose(c, theta_perm(c, n))
        if e:
            block = compose(block, cycle([end, n + 1 - end], n))
        factors.append(block)
        start = end + 1
    perm = compose(*factors)
    if not commutes_with_w0(perm, n):
        raise InvalidSignature(f"sigma for {signature} does not commute with w0")
    return perm


def eps_j(h: int, j: int) -> tuple[int, ...]:
    """(1, ..., 1, 0, ..., 0) with h - j ones."""

    if not 0 <= j <= h:
        raise InvalidSignature(f"j must lie in [0, {h}], got {j}")
    return (1,) * (h - j) + (0,) * j


def conjugacy_reps(n: int) -> list[tuple[PartitionSignature, Permutation]]:
    h = n // 2
    reps = []
    for lam in partitions_of(h):
        for eps in admissible_eps(lam):
            signature = PartitionSignature(n, lam, eps)
            reps.append((signature, sigma(signature)))
    return reps


def theta_weyl_generators(n: int) -> list[Permutation]:
    h = n // 2
    gens = []
    for i in range(1, h):
        c = cycle([i, i + 1], n)
        gens.append(compose(c, theta_perm(c, n)))
    gens.append(cycle([h, n + 1 - h], n))
    return gens


def _perm_key(perm: Permutation) -> tuple[int, ...]:
    return tuple(perm.array_form)


def theta_weyl_group(n: int) -> list[Permutation]:
    """All elements of W^theta, ordered by image tuple."""

    gens = theta_weyl_generators(n)
    identity = Permutation(list(range(n)))
    elements = bfs_closure(
        [identity],
        lambda x: (compose(x, g) for g in gens),
        _perm_key,
        cap=2**n * 40320,
        label=f"W^theta for n={n}",
    )
    return list(elements.values())


def conjugacy_class_count(elements: Sequence[Permutation]) -> int:
    """Number of conjugacy classes of a permutation group given by its elements."""

    remaining = {_perm_key(x): x for x in elements}
    count = 0
    while remaining:
        _, x = remaining.popitem()
        count += 1
        for g in elements:
            remaining.pop(_perm_key(compose(g, x, ~g)), None)
    return count


def weyl_j_class(n: int, j: int) -> tuple[int, tuple[int, ...]]:
    """Degree and cycle type of w w0 on the middle block, for w = sigma(1, eps^j)."""

    degree = n - 2 * (n // 2 - j)
    return degree, (2,) * j + (1,) * (degree - 2 * j)


def _class_rep(n: int, cycle_type: Sequence[int]) -> Permutation:
    if sum(cycle_type) != n or any(part < 1 for part in cycle_type):
        raise InvalidInput(f"{tuple(cycle_type)} is not a partition of {n}")
    perm = Permutation(list(range(n)))
    start = 1
    for part in sorted(cycle_type, reverse=True):
        perm = compose(perm, cycle(list(range(start, start + part)), n))
        start += part
    return perm


def _symmetric_class(rep: Permutation, n: int) -> Iterator[Permutation]:
    gens = [cycle([i, i + 1], n) for i in range(1, n)]
    elements = bfs_closure(
        [rep],
        lambda x: (compose(g, x, g) for g in gens),
        _perm_key,
        cap=40320 * 9,
        label=f"S_{n} class",
    )
    return iter(elements.values())


def _conjugation_orbit(x: Permutation, gens: Sequence[Permutation]) -> dict[tuple[int, ...], Permutation]:
    actors = list(gens) + [~g for g in gens]
    return bfs_closure(
        [x],
        lambda y: (compose(g, y, ~g) for g in actors),
        _perm_key,
        cap=40320 * 9,
        label="subrack",
    )


def sym_class_typeD(n: int, cycle_type: Sequence[int]) -> bool:
    """Exhaustive type D test for the S_n class of ``cycle_type``, with r fixed."""

    if n > MAX_SYMMETRIC_DEGREE:
        raise TooLarge(f"S_{n} exceeds the exhaustive limit S_{MAX_SYMMETRIC_DEGREE}")
    r = _class_rep(n, cycle_type)
    for s in _symmetric_class(r, n):
        rs = compose(r, s)
        sr = compose(s, r)
        if compose(rs, rs) == compose(sr, sr):
            continue
        if _perm_key(s) not in _conjugation_orbit(r, [r, s]):
            logger.debug("S_%d class %s: witness s=%s", n, tuple(cycle_type), format_perm(s))
            return True
    return False
