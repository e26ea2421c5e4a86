"""Explicit constructions: the 4x4 block families, the q = 3 mod 4 witness,
the PSL_4(3) scan, the class of eth and the unipotent witnesses."""

from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Iterator

import numpy as np

from twistrack.algebra.autos import (
    SemidirectProduct,
    identity_automorphism,
    is_theta_semisimple,
    j_like,
    j_matrix,
    theta,
    theta_apply,
    theta_fixed,
    twisted_act,
)
from twistrack.algebra.ffield import (
    FieldParams,
    extension,
    field_of_order,
    format_element,
    generator,
)
from twistrack.algebra.matgrp import (
    GroupMat,
    MatrixGroup,
    closure,
    det,
    diag,
    format_matrix,
    group_generators,
    identity,
    inverse,
    is_scalar,
    proj_canon,
    proj_order,
    sl_order,
    unit_matrix,
)
from twistrack.algebra.rack import disjoint_subracks, typeD_from_candidates, typeD_sides
from twistrack.algebra.torus import torus_realize
from twistrack.algebra.weyl import PartitionSignature
from twistrack.config import Settings, get_settings
from twistrack.schemas.verify import (
    H2Report,
    MissingClassReport,
    OddUnipotentReport,
    Psl43Report,
    QuestionReport,
    UnipotentReport,
)
from twistrack.services.exceptions import (
    BudgetExceeded,
    CertificationFailed,
    HEven,
    PreconditionViolated,
    ServiceError,
)

logger = logging.getLogger(__name__)

MISSING_SAMPLE_SIZE = 32


def adjugate(a: GroupMat) -> GroupMat:
    """J_2 A^T J_2^-1 for a 2x2 block, i.e. [[d, -b], [-c, a]]."""

    gf = type(a)
    return gf([[int(a[1, 1]), int(-a[0, 1])], [int(-a[1, 0]), int(a[0, 0])]])


def n_matrix(a: GroupMat, e: GroupMat, f_block: GroupMat) -> GroupMat:
    gf = type(a)
    out = gf.Zeros((4, 4))
    out[:2, :2] = a
    out[:2, 2:] = e
    out[2:, :2] = f_block
    out[2:, 2:] = adjugate(a)
    return out


def m_matrix(a: GroupMat, e, f_scalar) -> GroupMat:
    gf = type(a)
    ident = gf.Identity(2)
    return n_matrix(a, ident * e, ident * f_scalar)


def kappa(f: FieldParams) -> GroupMat:
    return diag(f, [f.one(), f.one(), -f.one(), -f.one()])


def u_t(x: GroupMat, t: GroupMat) -> GroupMat:
    """x t J x^T J t."""

    j = j_like(x)
    return x @ t @ j @ x.T @ j @ t


def is_m_shape(y: GroupMat) -> bool:
    """Scalar off-diagonal blocks and lower-right block adj(upper-left)."""

    if y.shape != (4, 4):
        return False
    top_right, bottom_left = y[:2, 2:], y[2:, :2]
    for block in (top_right, bottom_left):
        if not (block[0, 1] == 0 and block[1, 0] == 0 and block[0, 0] == block[1, 1]):
            return False
    return bool(np.array_equal(y[2:, 2:], adjugate(y[:2, :2])))


def h2_witness(q: int) -> tuple[GroupMat, dict]:
    if q % 4 != 3 or q in (3, 7):
        raise PreconditionViolated(f"needs q = 3 mod 4 and q not in {{3, 7}}, got {q}")
    f = field_of_order(q)
    ext = extension(f, 2)
    xi = generator(ext.field)
    c = xi ** ((q - 1) // 2)
    c_inv = c**-1
    trace_in_base = ext.contains(c - c_inv)
    if not trace_in_base:
        raise CertificationFailed("Tr(z)/2 does not lie in GF(q)")
    half_trace = ext.restrict(c - c_inv)
    a = f.GF([[int(half_trace), 1], [1, 0]])
    x = m_matrix(a, f.zero(), f.zero())
    expected = (q + 1) // 2
    conditions = {
        "det_one": bool(det(x) == 1),
        "trace_in_base": trace_in_base,
        "distinct_eigenvalues": bool(c != -c_inv),
    }
    order_sq = proj_order(proj_canon(x @ x), f)
    order_u1 = proj_order(proj_canon(u_t(x, identity(f, 4))), f)
    if not all(conditions.values()) or order_sq != expected or order_u1 != expected:
        raise CertificationFailed(
            f"q={q}: orders (x^2, u_1(x)) = ({order_sq}, {order_u1}), expected {expected}; {conditions}"
        )
    if expected % 2 or expected <= 4:
        raise CertificationFailed(f"q={q}: projective order {expected} is not even and greater than 4")
    return x, {
        "trace_half": format_element(half_trace, f),
        "order_x_squared": order_sq,
        "order_u1": order_u1,
        "expected": expected,
        "conditions": conditions,
    }


def psl43_scan() -> Psl43Report:
    """Every invertible m(A, e, f) over GF(3) with determinant 1."""

    f = field_of_order(3)
    gf = f.GF
    ident = identity(f, 4)
    histogram: Counter = Counter()
    deltas: Counter = Counter()
    scanned = 0
    for code in range(81):
        entries = [(code // 3**k) % 3 for k in range(4)]
        a = gf(np.array(entries, dtype=np.int64).reshape(2, 2))
        for e in f.elements():
            for fs in f.elements():
                scanned += 1
                y = m_matrix(a, e, fs)
                delta = det(a) - e * fs
                if det(y) != delta**2:
                    raise CertificationFailed(f"det Y != delta^2 for A={entries}, e={e}, f={fs}")
                if det(y) != 1:
                    continue
                trace_a = a[0, 0] + a[1, 1]
                if np.trace(y) != trace_a + trace_a:
                    raise CertificationFailed(f"Tr Y != 2 Tr A for A={entries}")
                if not np.array_equal(y @ y, y * trace_a - ident * delta):
                    raise CertificationFailed(f"Y does not satisfy its quadratic for A={entries}")
                histogram[proj_order(y, f)] += 1
                deltas["1" if delta == 1 else "-1"] += 1
    report = Psl43Report(
        scanned=scanned,
        invertible=sum(histogram.values()),
        max_proj_order=max(histogram),
        histogram=dict(sorted(histogram.items())),
        delta_histogram=dict(sorted(deltas.items())),
    )
    logger.info("PSL_4(3) scan: %d matrices, max projective order %d", report.invertible, report.max_proj_order)
    return report


def _missing_signature(n: int) -> PartitionSignature:
    if n % 2:
        raise PreconditionViolated(f"the class of eth needs n even, got {n}")
    h = n // 2
    if h % 2 == 0:
        raise HEven(f"h = {h} is even: the class is not exceptional")
    return PartitionSignature(n, (h,), (1,))


def missing_class_rep(n: int, q: int, *, seed: int = 0) -> tuple[GroupMat, MissingClassReport]:
    """t_eta with eta = zeta^((1 + q^h) / 2) in the realized torus of w = sigma_{(h),(1)}."""

    sig = _missing_signature(n)
    f = field_of_order(q)
    h = n // 2
    exponent = (1 + q**h) // 2
    realized = torus_realize(sig, f, "GL")
    t_eta = realized.element((exponent,))
    semisimple = is_theta_semisimple(t_eta, f)
    product = t_eta @ theta_apply(t_eta)
    if not semisimple or not is_scalar(product):
        raise CertificationFailed(f"t_eta for n={n}, q={q} is not a theta-semisimple involution class")
    pgl = MatrixGroup(f, n, "PGL")
    coset = SemidirectProduct(theta(pgl))
    theta_order = coset.order(coset.embed(pgl.lift(t_eta)))

    sl_torus = torus_realize(sig, f, "SL")
    keys = sorted(sl_torus.elements)
    rng = np.random.default_rng(seed)
    picks = rng.choice(len(keys), size=min(MISSING_SAMPLE_SIZE, len(keys)), replace=False)
    orders = []
    for index in sorted(picks):
        z = sl_torus.elements[keys[index]]
        r = z @ t_eta @ inverse(theta_apply(z))
        orders.append(proj_order(proj_canon(r @ inverse(t_eta)), f))
    report = MissingClassReport(
        n=n,
        q=q,
        exponent=exponent,
        representative=format_matrix(proj_canon(t_eta), f),
        theta_semisimple=semisimple,
        theta_product_order=theta_order,
        sampled_orders=orders,
        all_odd=all(order % 2 for order in orders),
    )
    return t_eta, report


def question_m(a: GroupMat, s: GroupMat) -> GroupMat:
    """(a ._theta s) theta(s): the product of two elements of the class of s theta."""

    return a @ s @ inverse(theta_apply(a)) @ theta_apply(s)


def _random_words(gens: list[GroupMat], f: FieldParams, n: int, rng: np.random.Generator) -> Iterator[GroupMat]:
    while True:
        length = int(rng.integers(1, 4 * n + 1))
        word = identity(f, n)
        for index in rng.integers(0, len(gens), size=length):
            word = word @ gens[index]
        yield word


def question_search(n: int, q: int, budget: int, *, seed: int = 0, group_cap: int = 10_000_000) -> QuestionReport:
    """Look for A in SL_n(q) with m(A) of even projective order greater than 4."""

    _missing_signature(n)
    f = field_of_order(q)
    s, _ = missing_class_rep(n, q, seed=seed)
    tried = 0

    def hit(a: GroupMat) -> int | None:
        order = proj_order(proj_canon(question_m(a, s)), f)
        return order if order % 2 == 0 and order > 4 else None

    def found(a: GroupMat, order: int, phase: str) -> QuestionReport:
        logger.info("Question search n=%d q=%d: witness of order %d in %s phase", n, q, order, phase)
        return QuestionReport(
            n=n,
            q=q,
            witness=format_matrix(a, f),
            witness_order=order,
            phase=phase,
            tried=tried,
            exhaustive=False,
            in_sl=bool(det(s) == 1),
        )

    sig = _missing_signature(n)
    for a in torus_realize(sig, f, "SL").elements.values():
        if tried >= budget:
            break
        tried += 1
        order = hit(a)
        if order is not None:
            return found(a, order, "torus")

    gens = group_generators("SL", n, f)
    if sl_order(n, q) <= min(budget, group_cap):
        group = MatrixGroup(f, n, "SL")
        for a in closure(gens, group, cap=group_cap).values():
            tried += 1
            order = hit(a)
            if order is not None:
                return found(a, order, "exhaustive")
        return QuestionReport(n=n, q=q, tried=tried, exhaustive=True, in_sl=bool(det(s) == 1))

    rng = np.random.default_rng(seed)
    for a in _random_words(gens, f, n, rng):
        if tried >= budget:
            break
        tried += 1
        order = hit(a)
        if order is not None:
            return found(a, order, "random")
    logger.info("Question search n=%d q=%d: no witness in %d candidates", n, q, tried)
    return QuestionReport(n=n, q=q, tried=tried, exhaustive=False, in_sl=bool(det(s) == 1))


def sigma_matrix(f: FieldParams, n: int) -> GroupMat:
    """Identity in the middle, e_1 -> -e_n and e_n -> e_1."""

    out = identity(f, n)
    out[0, 0] = 0
    out[n - 1, n - 1] = 0
    out[0, n - 1] = 1
    out[n - 1, 0] = -f.one()
    return out


def _square_class(f: FieldParams, square: bool) -> list:
    squares = {int(x * x) for x in f.units()}
    return [x for x in f.units() if (int(x) in squares) == square]


def _twisters(f: FieldParams, n: int, eta) -> Iterator[tuple[GroupMat, object]]:
    """g with v = g ._theta u; the diagonal family needs xi^2 != 1 and (xi eta)^2 != 2."""

    if n > 4 or f.q % 4 == 3:
        entries = [-f.one(), -f.one()] + [f.one()] * (n - 2)
        yield diag(f, entries), None
        return
    two = f.GF(2)
    preferred = [f.GF(2)] if f.q == 5 else []
    rest = [x for x in f.units() if x not in preferred]
    for xi in preferred + rest:
        if xi * xi == 1 or (xi * eta) ** 2 == two:
            continue
        yield diag(f, [f.one(), xi, f.one(), xi**-1]), xi


def unipotent_witness(n: int, q: int, eta_square: bool = True, *, subgroup_cap: int = 200_000) -> UnipotentReport:
    """A type D pair r = 1 + eta e_{1,n}, s = sigma ._theta (g ._theta r) inside G^theta."""

    if n % 2 or n <= 2 or q <= 3:
        raise PreconditionViolated(f"needs n even, n > 2 and q > 3, got n={n}, q={q}")
    f = field_of_order(q)
    group = MatrixGroup(f, n, "PSL")
    twist = theta(group)
    plain = identity_automorphism(group)
    sigma = sigma_matrix(f, n)
    branch = "generic" if n > 4 or q % 4 == 3 else "diagonal"
    for eta in _square_class(f, eta_square):
        r = group.lift(identity(f, n) + unit_matrix(f, n, 0, n - 1, eta))
        for g, xi in _twisters(f, n, eta):
            v = twisted_act(group.lift(g), r, twist)
            s = twisted_act(group.lift(sigma), v, twist)
            if not (theta_fixed(r, projective=True) and theta_fixed(s, projective=True)):
                continue
            left, right = typeD_sides(r, s, plain)
            if np.array_equal(left, right):
                continue
            subracks = disjoint_subracks(r, s, plain, cap=subgroup_cap)
            if subracks is None:
                continue
            rack_r, rack_s = subracks
            logger.info("Unipotent witness n=%d q=%d eta=%s xi=%s", n, q, eta, xi)
            return UnipotentReport(
                n=n,
                q=q,
                eta=format_element(eta, f),
                xi=format_element(xi, f) if xi is not None else None,
                branch=branch,
                r=format_matrix(r, f),
                s=format_matrix(s, f),
                left=format_matrix(left, f),
                right=format_matrix(right, f),
                subrack_sizes=[len(rack_r), len(rack_s)],
            )
    raise CertificationFailed(f"no unipotent type D pair certified for n={n}, q={q}")


def cayley(x: GroupMat) -> GroupMat:
    ident = type(x).Identity(x.shape[0])
    return (ident + x) @ inverse(ident - x)


def _orthogonal_nilpotent(m: GroupMat, j: GroupMat) -> GroupMat:
    return m - j @ m.T @ j


def borel_generators(f: FieldParams, n: int) -> list[GroupMat]:
    """Unipotent root elements and diagonal torus elements of the theta-fixed Borel subgroup."""

    j = j_matrix(n, f)
    gens = [cayley(_orthogonal_nilpotent(unit_matrix(f, n, i, i + 1), j)) for i in range(n // 2)]
    a = generator(f)
    for i in range(n // 2):
        entries = [f.one()] * n
        entries[i] = a
        entries[n - 1 - i] = a**-1
        gens.append(diag(f, entries))
    return gens


def regular_unipotent(f: FieldParams, n: int) -> GroupMat:
    """Cayley transform of the regular nilpotent superdiagonal, which lies in Lie(G^theta)."""

    nilpotent = f.GF.Zeros((n, n))
    for i in range(n - 1):
        nilpotent[i, i + 1] = 1
    return cayley(nilpotent)


def regular_unipotent_odd(
    n: int,
    q: int,
    *,
    pair_budget: int = 100_000,
    subgroup_cap: int = 200_000,
    seed: int = 0,
) -> OddUnipotentReport:
    if n % 2 == 0 or n <= 3:
        raise PreconditionViolated(f"needs n odd and n > 3, got {n}")
    f = field_of_order(q)
    u = regular_unipotent(f, n)
    if not theta_fixed(u) or det(u) != 1:
        raise CertificationFailed("the regular unipotent element is not in SO_n(q)")
    gens = borel_generators(f, n)
    gens += [inverse(g) for g in gens]
    rng = np.random.default_rng(seed)

    def candidates() -> Iterator[GroupMat]:
        for b in _random_words(gens, f, n, rng):
            yield b @ u @ inverse(b)

    psi = identity_automorphism(MatrixGroup(f, n, "SL"))
    scan = typeD_from_candidates(u, candidates(), psi, pair_budget=pair_budget, subgroup_cap=subgroup_cap)
    if scan.witness is None:
        raise BudgetExceeded(f"no type D pair among {scan.pairs_tried} Borel conjugates", limit=pair_budget)
    w = scan.witness
    return OddUnipotentReport(
        n=n,
        q=q,
        r=format_matrix(w.r, f),
        s=format_matrix(w.s, f),
        pairs_tried=scan.pairs_tried,
        subrack_sizes=list(w.sizes),
    )


class SpecialService:
    """Certifying wrappers; every failure surfaces as a ServiceError."""

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

    def h2(self, q: int) -> H2Report:
        x, data = self._run("h2 witness", h2_witness, q)
        logger.info("Certified q=3 mod 4 witness at q=%d, order %d", q, data["expected"])
        return H2Report(q=q, x=format_matrix(x, field_of_order(q)), **data)

    def psl43(self) -> Psl43Report:
        return self._run("PSL_4(3) scan", psl43_scan)

    def missing_class(self, n: int, q: int) -> MissingClassReport:
        _, report = self._run("missing class", missing_class_rep, n, q, seed=self._settings.seed)
        return report

    def question(self, n: int, q: int, budget: int) -> QuestionReport:
        return self._run(
            "question search",
            question_search,
            n,
            q,
            budget,
            seed=self._settings.seed,
            group_cap=self._settings.group_cap,
        )

    def unipotent(self, n: int, q: int, eta_square: bool = True) -> UnipotentReport:
        return self._run(
            "unipotent witness",
            unipotent_witness,
            n,
            q,
            eta_square,
            subgroup_cap=self._settings.subgroup_cap,
        )

    def regular_unipotent(self, n: int, q: int) -> OddUnipotentReport:
        return self._run(
            "regular unipotent search",
            regular_unipotent_odd,
            n,
            q,
            pair_budget=self._settings.pair_budget,
            subgroup_cap=self._settings.subgroup_cap,
            seed=self._settings.seed,
        )
