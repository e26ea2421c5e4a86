"""Decision ladder for theta-semisimple twisted classes of PSL_n(q).

A class is described by the theta-fixed Weyl class (lambda, eps) of its torus
and, optionally, by facts about a representative x. Certified branches carry
the tag of the criterion that proves type D; everything else falls through to
a row of the exception table.
"""

from __future__ import annotations

import itertools
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from twistrack.algebra.ffield import FieldParams, field_of_order, prime_power
from twistrack.algebra.torus import torus_model, two_orbits_criterion, zeta_criterion
from twistrack.algebra.weyl import PartitionSignature, admissible_eps, partitions_of
from twistrack.schemas.classify import (
    ClassDescriptor,
    MainTheoremReport,
    MonotonicityViolation,
    Refinement,
    SweepEntry,
    SweepReport,
    TableDocument,
    TableRow,
    Verdict,
    XInfo,
)
from twistrack.services.exceptions import (
    InvalidDescriptor,
    PreconditionViolated,
    ServiceError,
)

logger = logging.getLogger(__name__)

TORUS_TAGS = frozenset({"Tw.1", "Tw.2", "Tw.3", "Tw.4", "Tw.5", "zeta", "two-orbits", "5.9"})
MISSING_CLASS_ROW = "r1e1-2odd"
DEFAULT_TABLE = Path(__file__).resolve().parents[2] / "table1.json"


@dataclass(frozen=True)
class XState:
    """One consistent assignment of the facts about x."""

    identity: bool
    theta_inverse: bool
    missing: bool

    def label(self) -> str:
        if self.identity:
            return "x=1"
        if self.missing:
            return "x~eth"
        return "theta(x)=x^-1" if self.theta_inverse else "theta(x)!=x^-1"


def odd_prime_powers(q_max: int) -> list[int]:
    out = []
    for q in range(3, q_max + 1, 2):
        try:
            prime_power(q)
        except ServiceError:
            continue
        out.append(q)
    return out


def signatures(n: int) -> Iterator[PartitionSignature]:
    for lam in partitions_of(n // 2):
        for eps in admissible_eps(lam):
            yield PartitionSignature(n, lam, eps)


def in_range(n: int, q: int) -> bool:
    return not (n == 2 and q == 3)


def _type_d(tag: str, **notes) -> Verdict:
    return Verdict(outcome="TypeD", justification=tag, witness=dict(notes))


def _exception(row: str) -> Verdict:
    return Verdict(outcome="PossibleException", justification="table", table_row=row)


def _lam_is_one(sig: PartitionSignature) -> bool:
    return all(part == 1 for part in sig.lam)


def _missing_applies(sig: PartitionSignature) -> bool:
    return (
        sig.n % 2 == 0
        and sig.r == 1
        and sig.eps == (1,)
        and not _lam_is_one(sig)
        and sig.h % 2 == 1
    )


def _split_signature(n: int) -> PartitionSignature:
    h = n // 2
    return PartitionSignature(n, (1,) * h, (0,) * h)


def _lambda_one(sig: PartitionSignature, q: int, state: XState | None) -> Verdict:
    n = sig.n
    zeros = sig.eps.count(0)
    if (n % 2 == 0 and zeros >= 3) or (n % 2 == 1 and zeros > 3):
        return _type_d("weyl-j", zeros=zeros)
    if n not in (3, 4) and q > 5:
        return _type_d("Tw.3")
    if n == 3 and (q in (9, 11) or q > 13):
        return _type_d("Tw.4")
    if n == 4 and q > 9 and q % 4 == 1:
        return _type_d("Tw.5")
    if state is not None and state.identity and n == 4:
        if q % 4 == 3 and q not in (3, 7):
            return _type_d("5.10")
        if q == 3:
            return Verdict(
                outcome="NotTypeD",
                justification="oracle",
                notes=["the theta-class of 1 in PSL_4(3) has projective orders at most 4"],
            )
    if q in (3, 5):
        return _exception("one-q35")
    if n == 3:
        return _exception("one-n3")
    if n == 4 and q % 4 == 3:
        return _exception("one-n4-3mod4")
    if n == 4 and q == 9:
        return _exception("one-n4-q9")
    raise InvalidDescriptor(f"no branch for {sig} at q={q}")  # pragma: no cover


def _rank_two(sig: PartitionSignature, q: int) -> Verdict:
    lam1, lam2 = sig.lam
    if sig.eps[0] == 1:
        return _type_d("r2e1")
    if q > 5:
        return _type_d("r2e0")
    if q == 5 and lam2 > 1:
        return _type_d("r2e0", refinement=True)
    if q == 3 and lam1 > 1 and lam2 > 2:
        return _type_d("r2e0", refinement=True)
    return _exception("r2-q35")


def _rank_one_eps0(sig: PartitionSignature, q: int, state: XState) -> Verdict:
    if sig.h >= 3:
        return _type_d("5.9")
    if not state.theta_inverse:
        return _exception("r1e0-n4-q37") if q in (3, 7) else _type_d("5.9")
    if q % 4 == 1 and q not in (5, 9):
        return _type_d("5.9")
    if q % 4 == 3 and q not in (3, 7):
        return _type_d("5.10")
    return _exception("r1e0-n4-q37" if q in (3, 7) else "r1e0-n4-q59")


def _rank_one_eps1(sig: PartitionSignature, q: int, state: XState) -> Verdict:
    n = sig.n
    if not state.theta_inverse:
        return _exception("r1e1-n4-q37") if n == 4 and q in (3, 7) else _type_d("5.12")
    if state.identity:
        if n >= 6:
            return _type_d("5.12")
        if q > 9:
            return _type_d("Tw.5" if q % 4 == 1 else "5.10")
        verdict = _lambda_one(_split_signature(n), q, state)
        verdict.notes.append("class of 1: decided on the split torus")
        return verdict
    if sig.h % 2 == 0:
        return _type_d("5.12")
    return _exception(MISSING_CLASS_ROW) if state.missing else _type_d("5.12")


def ladder(sig: PartitionSignature, q: int, state: XState | None) -> Verdict:
    """The verdict for one consistent x-state (``None`` where x does not matter)."""

    if _lam_is_one(sig):
        return _lambda_one(sig, q, state)
    if sig.n % 2 == 1:
        return _type_d("Tw.1")
    if sig.r > 2:
        return _type_d("Tw.2")
    if sig.r == 2:
        return _rank_two(sig, q)
    if state is None:
        raise InvalidDescriptor("rank-one branches need an x-state")  # pragma: no cover
    if sig.eps == (0,):
        return _rank_one_eps0(sig, q, state)
    return _rank_one_eps1(sig, q, state)


def _choices(value: bool | None, default: Iterable[bool]) -> list[bool]:
    return [value] if value is not None else list(default)


def x_states(sig: PartitionSignature, info: XInfo) -> list[XState]:
    """Every assignment of the x-facts consistent with ``info`` and ``sig``.

    Unknown identity is only branched on for the split signature, where the
    class of 1 lives; the rank-one eps=(1) branch defers that class to it.
    """

    if info.is_identity_coset and info.theta_inverse is False:
        raise InvalidDescriptor("x = 1 forces theta(x) = x^-1")
    if info.is_missing_class and not _missing_applies(sig):
        raise InvalidDescriptor(f"the class of eth does not occur for {sig}")
    if info.is_missing_class and (info.is_identity_coset or info.theta_inverse is False):
        raise InvalidDescriptor("the class of eth is a non-trivial theta-involution class")

    split = _lam_is_one(sig) and all(e == 0 for e in sig.eps)
    states = []
    for identity in _choices(info.is_identity_coset, (False, True) if split else (False,)):
        inverse_choices = (True,) if identity else (False, True)
        for theta_inverse in _choices(info.theta_inverse, inverse_choices):
            missing_possible = _missing_applies(sig) and theta_inverse and not identity
            for missing in _choices(info.is_missing_class, (False, True) if missing_possible else (False,)):
                if missing and not missing_possible:
                    continue
                states.append(XState(identity, theta_inverse, missing))
    return states


def _needs_state(sig: PartitionSignature) -> bool:
    return _lam_is_one(sig) or (sig.n % 2 == 0 and sig.r == 1)


def weakest(verdicts: list[tuple[XState, Verdict]]) -> Verdict:
    """PossibleException if any state is exceptional, then NotTypeD, then TypeD."""

    for outcome in ("PossibleException", "NotTypeD", "TypeD"):
        hits = [(s, v) for s, v in verdicts if v.outcome == outcome]
        if hits:
            _, chosen = hits[0]
            break
    result = chosen.model_copy(deep=True)
    if len(verdicts) > 1:
        result.notes.extend(
            f"{state.label()}: {v.table_row or v.justification}" for state, v in verdicts
        )
    return result


def evidence(sig: PartitionSignature, f: FieldParams) -> dict:
    """Torus data behind the order criteria, for reports."""

    model = torus_model(sig, f)
    witness = model.max_order_witness()
    return {
        "gamma_image": str(model.image[0].canonical()),
        "gamma_image_order": model.image[0].order,
        "max_order": witness.order,
        "vector": list(witness.vector),
        "zeta": zeta_criterion(sig, f) is not None,
        "two_orbits": two_orbits_criterion(sig, f) is not None,
    }


def matches(selector: dict, value: int) -> bool:
    if "values" in selector and value not in selector["values"]:
        return False
    if selector.get("parity") == "even" and value % 2:
        return False
    if selector.get("parity") == "odd" and not value % 2:
        return False
    if selector.get("twice_odd") and not (value % 2 == 0 and (value // 2) % 2 == 1):
        return False
    if "mod" in selector and value % selector["mod"] != selector["residue"]:
        return False
    return True


def _row_matches(row: TableRow, sig: PartitionSignature, q: int) -> bool:
    if (row.lam == "one") != _lam_is_one(sig):
        return False
    if row.r is not None and sig.r != row.r:
        return False
    if row.eps is not None and list(sig.eps) != row.eps:
        return False
    if row.eps_first is not None and sig.eps[0] != row.eps_first:
        return False
    return matches(row.n, sig.n) and matches(row.q, q)


def load_table(path: str | Path | None = None) -> TableDocument:
    path = Path(path) if path is not None else DEFAULT_TABLE
    try:
        return TableDocument.model_validate(json.loads(path.read_text()))
    except (OSError, ValueError) as exc:
        raise InvalidDescriptor(f"cannot read exception table {path}", cause=exc)


def expand_table(table: TableDocument, n_max: int, q_max: int) -> list[SweepEntry]:
    """Every (n, q, lambda, eps) the transcribed table lists, first matching row wins."""

    entries = []
    for n in range(2, n_max + 1):
        for q in odd_prime_powers(q_max):
            if not in_range(n, q):
                continue
            for sig in signatures(n):
                row = next((row for row in table.rows if _row_matches(row, sig, q)), None)
                if row is None or _excluded(table, row, sig, q):
                    continue
                entries.append(SweepEntry(n=n, q=q, lam=list(sig.lam), eps=list(sig.eps), row=row.id))
    return entries


def _excluded(table: TableDocument, row: TableRow, sig: PartitionSignature, q: int) -> bool:
    for refinement in table.refinements:
        if refinement.row == row.id and refinement.q == q:
            if sig.lam[0] >= refinement.lam1_min and sig.lam[1] >= refinement.lam2_min:
                return True
    rule = table.asterisk
    if rule is not None and row.asterisk and rule.row == row.id:
        zeros = sig.eps.count(0)
        return zeros >= (rule.zeros_min_even if sig.n % 2 == 0 else rule.zeros_min_odd)
    return False


class ClassifierService:
    def __init__(self, *, workers: int = 1, table_path: str | Path | None = None) -> None:
        self._workers = workers
        self._table_path = table_path

    def _validate(self, descriptor: ClassDescriptor) -> tuple[PartitionSignature, FieldParams]:
        n, q = descriptor.n, descriptor.q
        try:
            f = field_of_order(q)
        except ServiceError as exc:
            raise InvalidDescriptor(f"q={q} is not an odd prime power", cause=exc)
        if not in_range(n, q):
            raise InvalidDescriptor("PSL_2(3) is excluded")
        try:
            sig = PartitionSignature(n, tuple(descriptor.lam), tuple(descriptor.eps))
        except ServiceError as exc:
            raise InvalidDescriptor(str(exc), cause=exc)
        return sig, f

    def classify(self, descriptor: ClassDescriptor, *, with_evidence: bool = False) -> Verdict:
        try:
            sig, f = self._validate(descriptor)
            q = descriptor.q
            if _needs_state(sig):
                states = x_states(sig, descriptor.x_info)
                verdict = weakest([(state, ladder(sig, q, state)) for state in states])
            else:
                verdict = ladder(sig, q, None)
            if with_evidence and verdict.justification in TORUS_TAGS:
                verdict.witness.update(evidence(sig, f))
            logger.debug("classify %s q=%d -> %s %s", sig, q, verdict.outcome, verdict.table_row or verdict.justification)
            return verdict
        except ServiceError:
            raise
        except Exception as exc:
            logger.exception("Unexpected error while classifying %s", descriptor)
            raise ServiceError("Failed to classify class descriptor", cause=exc)

    def _cell(self, n: int, q: int) -> list[SweepEntry]:
        found = []
        for sig in signatures(n):
            descriptor = ClassDescriptor(n=n, q=q, lam=list(sig.lam), eps=list(sig.eps))
            verdict = self.classify(descriptor)
            if verdict.outcome == "PossibleException":
                found.append(SweepEntry(n=n, q=q, lam=list(sig.lam), eps=list(sig.eps), row=verdict.table_row))
        return found

    def table_sweep(self, n_max: int, q_max: int) -> list[SweepEntry]:
        """Every PossibleException over n <= n_max and odd prime powers q <= q_max."""

        cells = [(n, q) for n in range(2, n_max + 1) for q in odd_prime_powers(q_max) if in_range(n, q)]
        if self._workers > 1:
            with ThreadPoolExecutor(max_workers=self._workers) as pool:
                results = list(pool.map(lambda cell: self._cell(*cell), cells))
        else:
            results = [self._cell(*cell) for cell in cells]
        entries = sorted(itertools.chain.from_iterable(results), key=SweepEntry.key)
        logger.info("Sweep n<=%d q<=%d: %d possible exceptions", n_max, q_max, len(entries))
        return entries

    def sweep(self, n_max: int, q_max: int, *, compare_golden: bool = True) -> SweepReport:
        entries = self.table_sweep(n_max, q_max)
        report = SweepReport(n_max=n_max, q_max=q_max, entries=entries)
        if compare_golden:
            golden = expand_table(load_table(self._table_path), n_max, q_max)
            derived_keys = {e.key() for e in entries}
            golden_keys = {e.key() for e in golden}
            report.missing = [e for e in golden if e.key() not in derived_keys]
            report.extra = [e for e in entries if e.key() not in golden_keys]
            report.golden_match = not report.missing and not report.extra
            if not report.golden_match:
                logger.warning("Sweep differs from the table: %d missing, %d extra", len(report.missing), len(report.extra))
        return report

    def main_theorem_check(self, n: int, q: int) -> MainTheoremReport:
        if n < 5 or q < 7:
            raise PreconditionViolated(f"needs n >= 5 and q >= 7, got n={n}, q={q}")
        exceptions = self._cell(n, q)
        allowed = n % 4 == 2
        holds = all(e.row == MISSING_CLASS_ROW and allowed for e in exceptions)
        return MainTheoremReport(n=n, q=q, holds=holds, exceptions=exceptions)

    def rank_two_refinements(self, n_max: int) -> list[Refinement]:
        """Rank-two eps_1 = 0 classes at q in {3, 5} that are still certified."""

        found = []
        for n in range(4, n_max + 1, 2):
            for sig in signatures(n):
                if sig.r != 2 or _lam_is_one(sig) or sig.eps[0] != 0:
                    continue
                for q in (3, 5):
                    verdict = ladder(sig, q, None)
                    if verdict.outcome == "TypeD":
                        found.append(Refinement(n=n, q=q, lam=list(sig.lam), eps=list(sig.eps)))
        return found

    def monotonicity_report(self, n_max: int, q_max: int) -> list[MonotonicityViolation]:
        """Classes certified by a torus criterion at q but not at a larger q of the same branch.

        The branch of q is (q mod 4, gcd(n, q - 1)).
        """

        violations = []
        qs = odd_prime_powers(q_max)
        for n in range(2, n_max + 1):
            for sig in signatures(n):
                verdicts = {}
                for q in qs:
                    if in_range(n, q):
                        descriptor = ClassDescriptor(n=n, q=q, lam=list(sig.lam), eps=list(sig.eps))
                        verdicts[q] = self.classify(descriptor)
                for q, verdict in verdicts.items():
                    if verdict.outcome != "TypeD" or verdict.justification not in TORUS_TAGS:
                        continue
                    branch = (q % 4, math.gcd(n, q - 1))
                    for later, other in verdicts.items():
                        if later > q and (later % 4, math.gcd(n, later - 1)) == branch and other.outcome != "TypeD":
                            violations.append(
                                MonotonicityViolation(
                                    n=n,
                                    lam=list(sig.lam),
                                    eps=list(sig.eps),
                                    q_certified=q,
                                    q_failing=later,
                                    tag=verdict.justification,
                                )
                            )
        if violations:
            logger.warning("%d monotonicity violations flagged for review", len(violations))
        return violations
