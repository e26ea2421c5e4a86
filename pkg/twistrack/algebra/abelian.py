"""Finite abelian groups Z_d1 x ... x Z_dk and their subgroups and quotients.

Elements are integer exponent vectors. Subgroup and quotient structure come
from the lattice spanned by the generators together with diag(d):
the quotient is Z^k / L and the subgroup is L / diag(d) Z^k.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property, reduce

from sympy import Matrix, ZZ, factorint
from sympy.matrices.normalforms import hermite_normal_form, invariant_factors

from twistrack.services.exceptions import InternalInconsistency, InvalidInput

Vector = tuple[int, ...]


def _lcm(values: Iterable[int]) -> int:
    return reduce(math.lcm, values, 1)


def _nontrivial(factors: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(abs(int(d)) for d in factors if abs(int(d)) != 1))


def smith_invariants(rows: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Invariant factors of an integer matrix, zeros included, ones dropped."""

    matrix = Matrix(rows)
    if matrix.rows == 0 or matrix.cols == 0:
        return ()
    factors = invariant_factors(matrix, domain=ZZ)
    return _nontrivial(int(d) for d in factors)


@dataclass(frozen=True)
class CyclicProduct:
    """Z_{moduli[0]} x Z_{moduli[1]} x ...; all moduli are positive."""

    moduli: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(d < 1 for d in self.moduli):
            raise InvalidInput(f"cyclic factors must be positive, got {self.moduli}")

    @property
    def rank(self) -> int:
        return len(self.moduli)

    @property
    def order(self) -> int:
        return math.prod(self.moduli)

    @property
    def exponent(self) -> int:
        return _lcm(self.moduli)

    @cached_property
    def invariants(self) -> tuple[int, ...]:
        """Invariant factors d1 | d2 | ..., trivial factors dropped."""

        if not self.moduli:
            return ()
        diagonal = [[d if i == j else 0 for j in range(self.rank)] for i, d in enumerate(self.moduli)]
        return smith_invariants(diagonal)

    def canonical(self) -> "CyclicProduct":
        return CyclicProduct(self.invariants)

    def is_trivial(self) -> bool:
        return self.order == 1

    def is_cyclic(self) -> bool:
        return len(self.invariants) <= 1

    def reduce(self, v: Sequence[int]) -> Vector:
        if len(v) != self.rank:
            raise InvalidInput(f"vector of length {len(v)} in a group of rank {self.rank}")
        return tuple(int(x) % d for x, d in zip(v, self.moduli))

    def add(self, a: Sequence[int], b: Sequence[int]) -> Vector:
        return self.reduce([x + y for x, y in zip(a, b)])

    def scale(self, a: Sequence[int], k: int) -> Vector:
        return self.reduce([x * k for x in a])

    def zero(self) -> Vector:
        return (0,) * self.rank

    def element_order(self, v: Sequence[int]) -> int:
        return _lcm(d // math.gcd(d, int(x) % d) for x, d in zip(v, self.moduli))

    def _lattice_basis(self, gens: Sequence[Sequence[int]]) -> Matrix:
        columns = [list(self.reduce(g)) for g in gens]
        columns += [[d if i == j else 0 for i in range(self.rank)] for j, d in enumerate(self.moduli)]
        spanning = Matrix(columns).T
        return hermite_normal_form(spanning)

    def quotient(self, gens: Sequence[Sequence[int]]) -> "CyclicProduct":
        """The group modulo the subgroup generated by ``gens``."""

        if not self.moduli:
            return CyclicProduct(())
        basis = self._lattice_basis(gens)
        return CyclicProduct(smith_invariants(basis.tolist()))

    def subgroup(self, gens: Sequence[Sequence[int]]) -> "CyclicProduct":
        """Structure of the subgroup generated by ``gens``."""

        if not self.moduli:
            return CyclicProduct(())
        basis = self._lattice_basis(gens)
        diagonal = Matrix.diag(*self.moduli)
        relative = basis.inv() * diagonal
        return CyclicProduct(smith_invariants([[int(x) for x in row] for row in relative.tolist()]))

    def max_order_combination(self, gens: Sequence[Sequence[int]]) -> tuple[list[int], int]:
        """Coefficients c with sum c_i gens_i of order equal to the subgroup exponent."""

        orders = [self.element_order(g) for g in gens]
        exponent = _lcm(orders)
        coeffs = [0] * len(gens)
        for prime, power in factorint(exponent).items():
            full = prime**power
            index = next(i for i, order in enumerate(orders) if order % full == 0)
            # components of coprime orders; their sum has the product order
            coeffs[index] += orders[index] // full
        return coeffs, exponent

    def kernel(
        self,
        hom: Sequence[Sequence[int]],
        target: "CyclicProduct",
    ) -> tuple["CyclicProduct", list[Vector]]:
        """Kernel of the map with ``target.rank`` x ``self.rank`` integer matrix ``hom``.

        The kernel lattice is read off the first columns of the column Hermite
        form of [[I, 0], [hom, diag(target)]], which is upper triangular.
        """

        k, l = self.rank, target.rank
        if k == 0:
            return CyclicProduct(()), []
        top = [[1 if i == j else 0 for j in range(k)] + [0] * l for i in range(k)]
        bottom = [
            [int(hom[i][j]) for j in range(k)] + [target.moduli[i] if i == j else 0 for j in range(l)]
            for i in range(l)
        ]
        form = hermite_normal_form(Matrix(top + bottom))
        basis = form[:k, :k]
        gens = [self.reduce([int(basis[i, j]) for i in range(k)]) for j in range(k)]
        relative = basis.inv() * Matrix.diag(*self.moduli)
        structure = CyclicProduct(smith_invariants([[int(x) for x in row] for row in relative.tolist()]))
        for g in gens:
            if any(v for v in target.reduce([sum(int(hom[i][j]) * g[j] for j in range(k)) for i in range(l)])):
                raise InternalInconsistency("kernel generator does not map to zero")
        image = target.subgroup([[int(hom[i][j]) for i in range(l)] for j in range(k)]) if l else CyclicProduct(())
        if structure.order * image.order != self.order:
            raise InternalInconsistency("kernel and image orders do not multiply to the group order")
        return structure, gens

    def image(self, endomorphism: Sequence[Sequence[int]]) -> "CyclicProduct":
        """Image of the endomorphism whose i-th column is the image of e_i."""

        columns = [[int(endomorphism[i][j]) for i in range(self.rank)] for j in range(self.rank)]
        return self.subgroup(columns)

    def __str__(self) -> str:
        if not self.invariants:
            return "1"
        return " x ".join(f"Z{d}" for d in self.invariants)
