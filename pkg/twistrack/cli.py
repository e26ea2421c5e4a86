"""Command-line entry point; every invocation writes JSON-lines report records."""

from __future__ import annotations

import argparse
import logging
import sys
import time
from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path
from typing import Any, TextIO

from pydantic import ValidationError

from twistrack import __version__
from twistrack.algebra.autos import is_theta_semisimple, parse_automorphism, theta_apply
from twistrack.algebra.ffield import (
    elem_order,
    field_create,
    field_of_order,
    format_element,
    generator,
    parse_element,
)
from twistrack.algebra.matgrp import MatrixGroup, det, format_matrix, parse_matrix, proj_canon
from twistrack.algebra.rack import orbit_enumerate, typeD_search_scan
from twistrack.algebra.weyl import (
    conjugacy_class_count,
    conjugacy_reps,
    format_perm,
    theta_weyl_group,
    weyl_j_class,
)
from twistrack.config import Settings
from twistrack.main import configure_logging
from twistrack.schemas.classify import ClassDescriptor, XInfo
from twistrack.schemas.records import ReportRecord
from twistrack.schemas.torus import TorusRequest
from twistrack.schemas.verify import QuestionRequest
from twistrack.services import ClassifierService, OracleService, SpecialService, TorusService
from twistrack.services.exceptions import InvalidInput, ServiceError

logger = logging.getLogger(__name__)

WEYL_GROUP_LIMIT = 12
GLOBAL_OPTIONS = (
    "config",
    "out",
    "workers",
    "cache_dir",
    "orbit_cap",
    "group_cap",
    "subgroup_cap",
    "pair_budget",
    "seed",
    "log_level",
    "handler",
    "command",
    "action",
)


@dataclass
class Outcome:
    outcome: str
    witness: Any = None
    modulus: str | None = None
    ok: bool = True


def _ints(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _settings(args: argparse.Namespace) -> Settings:
    overrides = {
        name: getattr(args, name)
        for name in ("workers", "cache_dir", "orbit_cap", "group_cap", "subgroup_cap", "pair_budget", "seed", "log_level")
    }
    if args.config:
        return Settings.from_file(args.config, **overrides)
    return Settings(**{k: v for k, v in overrides.items() if v is not None})


# handlers


def _field(args, settings: Settings) -> Outcome:
    f = field_create(args.p, args.m)
    g = generator(f)
    witness = {"q": f.q, "generator": format_element(g, f)}
    if args.element is not None:
        x = parse_element(args.element, f)
        witness["element"] = format_element(x, f)
        witness["order"] = elem_order(x, f)
    return Outcome("ok", witness, f.modulus_text)


def _mat(args, settings: Settings) -> Outcome:
    f = field_of_order(args.q)
    x = parse_matrix(args.matrix, f)
    group = MatrixGroup(f, x.shape[0], args.level)
    if not group.contains(x):
        raise InvalidInput(f"matrix is not in {group}")
    x = group.lift(x)
    witness: dict[str, Any] = {"level": args.level, "matrix": format_matrix(x, f)}
    if args.op == "order":
        witness["order"] = group.order(x)
    elif args.op == "det":
        witness["det"] = format_element(det(x), f)
    elif args.op == "theta":
        witness["theta"] = format_matrix(theta_apply(x, projective=group.projective), f)
    elif args.op == "canon":
        witness["canon"] = format_matrix(proj_canon(x), f)
    elif args.op == "semisimple":
        witness["theta_semisimple"] = is_theta_semisimple(x, f)
    return Outcome("ok", witness, f.modulus_text)


def _weyl(args, settings: Settings) -> Outcome:
    reps = conjugacy_reps(args.n)
    witness: dict[str, Any] = {
        "classes": [{"signature": sig.text(), "sigma": format_perm(perm)} for sig, perm in reps],
    }
    if args.n <= WEYL_GROUP_LIMIT:
        witness["class_count"] = conjugacy_class_count(theta_weyl_group(args.n))
    if args.j is not None:
        degree, cycle_type = weyl_j_class(args.n, args.j)
        witness["j_class"] = {"degree": degree, "cycle_type": list(cycle_type)}
    ok = witness.get("class_count", len(reps)) == len(reps)
    return Outcome("ok" if ok else "mismatch", witness, ok=ok)


def _torus(args, settings: Settings) -> Outcome:
    request = TorusRequest(n=args.n, q=args.q, lam=args.lam, eps=args.eps, realize=args.realize)
    report = TorusService(settings).report(request)
    ok = report.theta_stable is not False
    return Outcome("ok" if ok else "not-theta-stable", report.model_dump(), field_of_order(args.q).modulus_text, ok)


def _orbit_of(args, settings: Settings):
    f = field_of_order(args.q)
    x = parse_matrix(args.x, f)
    group = MatrixGroup(f, x.shape[0], args.level)
    psi = parse_automorphism(args.psi, group)
    orbit = orbit_enumerate(x, group.generators(), psi, cap=settings.orbit_cap, workers=settings.workers)
    return f, orbit


def _orbit(args, settings: Settings) -> Outcome:
    f, orbit = _orbit_of(args, settings)
    witness = {"size": len(orbit), "base": format_matrix(orbit.base, f), "psi": str(orbit.psi)}
    return Outcome("ok", witness, f.modulus_text)


def _typed(args, settings: Settings) -> Outcome:
    f, orbit = _orbit_of(args, settings)
    scan = typeD_search_scan(
        orbit,
        pair_budget=settings.pair_budget,
        subgroup_cap=settings.subgroup_cap,
        fix_base=True,
    )
    witness: dict[str, Any] = {"orbit_size": len(orbit), "pairs_tried": scan.pairs_tried, "skipped": scan.skipped}
    if scan.witness is not None:
        w = scan.witness
        witness.update(r=format_matrix(w.r, f), s=format_matrix(w.s, f), subrack_sizes=list(w.sizes))
        outcome = "TypeD"
    else:
        outcome = "NotTypeD" if scan.exhaustive else "inconclusive"
    return Outcome(outcome, witness, f.modulus_text)


def _x_info(flags: list[str]) -> XInfo:
    info = XInfo()
    for flag in flags or []:
        if flag == "identity":
            info.is_identity_coset = True
        elif flag == "not-identity":
            info.is_identity_coset = False
        elif flag == "theta-inverse":
            info.theta_inverse = True
        elif flag == "not-theta-inverse":
            info.theta_inverse = False
        elif flag == "missing":
            info.is_missing_class = True
        elif flag == "not-missing":
            info.is_missing_class = False
    return info


def _classify(args, settings: Settings) -> Outcome:
    descriptor = ClassDescriptor(n=args.n, q=args.q, lam=args.lam, eps=args.eps, x_info=_x_info(args.x_info))
    verdict = ClassifierService(workers=settings.workers).classify(descriptor, with_evidence=args.evidence)
    return Outcome(verdict.outcome, verdict.model_dump(), field_of_order(args.q).modulus_text)


def _sweep(args, settings: Settings) -> Outcome:
    service = ClassifierService(workers=settings.workers, table_path=args.golden)
    report = service.sweep(args.n_max, args.q_max, compare_golden=args.golden is not None)
    witness: dict[str, Any] = report.model_dump()
    if args.refinements:
        witness["refinements"] = [r.model_dump() for r in service.rank_two_refinements(args.n_max)]
    ok = report.golden_match is not False
    if args.monotonicity:
        violations = service.monotonicity_report(args.n_max, args.q_max)
        witness["monotonicity_violations"] = [v.model_dump() for v in violations]
        ok = ok and not violations
    return Outcome("match" if ok else "mismatch", witness, ok=ok)


def _verify(args, settings: Settings) -> Outcome:
    special = SpecialService(settings)
    if args.action == "h2":
        report = special.h2(args.q)
        return Outcome("certified", report.model_dump(), field_of_order(args.q).modulus_text)
    if args.action == "psl43":
        report = special.psl43()
        ok = report.max_proj_order == 4
        return Outcome("certified" if ok else "failed", report.model_dump(), field_of_order(3).modulus_text, ok)
    if args.action == "unipotent":
        report = special.unipotent(args.n, args.q, not args.non_square)
        return Outcome("certified", report.model_dump(), field_of_order(args.q).modulus_text)
    if args.action == "regular":
        report = special.regular_unipotent(args.n, args.q)
        return Outcome("certified", report.model_dump(), field_of_order(args.q).modulus_text)
    if args.action == "missing":
        report = special.missing_class(args.n, args.q)
        return Outcome("certified", report.model_dump(), field_of_order(args.q).modulus_text)
    if args.action == "theorem51":
        report = OracleService(settings).theorem51(args.n, args.q)
        return Outcome("covered" if report.covered else "uncovered", report.model_dump(), field_of_order(args.q).modulus_text, report.covered)
    if args.action == "main":
        report = ClassifierService(workers=settings.workers).main_theorem_check(args.n, args.q)
        return Outcome("holds" if report.holds else "fails", report.model_dump(), field_of_order(args.q).modulus_text, report.holds)
    raise ServiceError(f"unknown verify action {args.action!r}")  # pragma: no cover


def _search(args, settings: Settings) -> Outcome:
    request = QuestionRequest(n=args.n, q=args.q, budget=args.budget)
    report = SpecialService(settings).question(request.n, request.q, request.budget)
    if report.witness is not None:
        outcome = "witness"
    else:
        outcome = "none-exhaustive" if report.exhaustive else "none-within-budget"
    return Outcome(outcome, report.model_dump(), field_of_order(args.q).modulus_text)


def _oracle(args, settings: Settings) -> Outcome:
    oracle = OracleService(settings)
    modulus = field_of_order(args.q).modulus_text
    if args.action == "enumerate":
        group = oracle.enumerate(args.kind, args.n, args.q)
        return Outcome("ok", {"group": f"{args.kind}_{args.n}({args.q})", "size": len(group)}, modulus)
    if args.action == "partition":
        orbits = oracle.partition(args.kind, args.n, args.q, args.twist)
        sizes = sorted(len(o) for o in orbits)
        return Outcome("ok", {"classes": len(orbits), "sizes": sizes, "total": sum(sizes)}, modulus)
    if args.action == "typed":
        f, orbit = _orbit_of(args, settings)
        result = oracle.exhaustive(orbit)
        witness: dict[str, Any] = {"orbit_size": len(orbit), "pairs_tried": result.pairs_tried}
        if result.witness is not None:
            witness.update(r=format_matrix(result.witness.r, f), s=format_matrix(result.witness.s, f))
        return Outcome("TypeD" if result.is_type_d else "NotTypeD", witness, modulus)
    if args.action == "theorem51":
        report = oracle.theorem51(args.n, args.q)
        return Outcome("covered" if report.covered else "uncovered", report.model_dump(), modulus, report.covered)
    if args.action == "count":
        twisted, coset = oracle.class_count_check(args.n, args.q)
        ok = twisted == coset
        return Outcome("match" if ok else "mismatch", {"twisted_classes": twisted, "coset_classes": coset}, modulus, ok)
    raise ServiceError(f"unknown oracle action {args.action!r}")  # pragma: no cover


# parser


def _add_signature(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=int, required=True)
    parser.add_argument("--q", type=int, required=True)
    parser.add_argument("--lambda", dest="lam", type=_ints, required=True, help="partition of n//2, e.g. 2,1")
    parser.add_argument("--eps", type=_ints, required=True, help="sign vector, e.g. 1,0")


def _add_orbit(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--q", type=int, required=True)
    parser.add_argument("--x", required=True, help="matrix rows separated by ';', entries by ','")
    parser.add_argument("--level", choices=["GL", "SL", "PGL", "PSL"], default="PSL")
    parser.add_argument("--psi", default="theta", help="e.g. theta, frob^1, ad:<matrix>*theta, id")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twistrack", description="Type D certification for twisted classes of PSL_n(q).")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--config", type=Path, help="key = value settings file")
    parser.add_argument("--out", type=Path, help="append records to this file instead of stdout")
    parser.add_argument("--workers", type=int)
    parser.add_argument("--cache-dir", dest="cache_dir", type=Path)
    parser.add_argument("--orbit-cap", dest="orbit_cap", type=int)
    parser.add_argument("--group-cap", dest="group_cap", type=int)
    parser.add_argument("--subgroup-cap", dest="subgroup_cap", type=int)
    parser.add_argument("--pair-budget", dest="pair_budget", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--log-level", dest="log_level")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("field", help="build GF(p^m) and inspect elements")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--element")
    p.set_defaults(handler=_field)

    p = commands.add_parser("mat", help="matrix operations at a group level")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--matrix", required=True)
    p.add_argument("--level", choices=["GL", "SL", "PGL", "PSL"], default="PSL")
    p.add_argument("--op", choices=["order", "det", "theta", "canon", "semisimple"], default="order")
    p.set_defaults(handler=_mat)

    p = commands.add_parser("weyl", help="classes of the theta-fixed Weyl group")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--j", type=int)
    p.set_defaults(handler=_weyl)

    p = commands.add_parser("torus", help="twisted torus, K_w and the image of gamma")
    _add_signature(p)
    p.add_argument("--realize", action="store_true")
    p.set_defaults(handler=_torus)

    p = commands.add_parser("orbit", help="size of a twisted class")
    _add_orbit(p)
    p.set_defaults(handler=_orbit)

    p = commands.add_parser("typed", help="budgeted type D search in a twisted class")
    _add_orbit(p)
    p.set_defaults(handler=_typed)

    p = commands.add_parser("classify", help="verdict for one class descriptor")
    _add_signature(p)
    p.add_argument(
        "--x-info",
        dest="x_info",
        action="append",
        choices=["identity", "not-identity", "theta-inverse", "not-theta-inverse", "missing", "not-missing"],
    )
    p.add_argument("--evidence", action="store_true")
    p.set_defaults(handler=_classify)

    p = commands.add_parser("sweep", help="every possible exception in a range")
    p.add_argument("--n-max", dest="n_max", type=int, required=True)
    p.add_argument("--q-max", dest="q_max", type=int, required=True)
    p.add_argument("--golden", type=Path)
    p.add_argument("--refinements", action="store_true")
    p.add_argument("--monotonicity", action="store_true")
    p.set_defaults(handler=_sweep)

    p = commands.add_parser("verify", help="certify an explicit construction")
    verify = p.add_subparsers(dest="action", required=True)
    v = verify.add_parser("h2")
    v.add_argument("--q", type=int, required=True)
    verify.add_parser("psl43")
    v = verify.add_parser("unipotent")
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--q", type=int, required=True)
    v.add_argument("--non-square", dest="non_square", action="store_true")
    for action in ("regular", "missing", "theorem51", "main"):
        v = verify.add_parser(action)
        v.add_argument("--n", type=int, required=True)
        v.add_argument("--q", type=int, required=True)
    p.set_defaults(handler=_verify)

    p = commands.add_parser("search", help="open searches")
    search = p.add_subparsers(dest="action", required=True)
    s = search.add_parser("question")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--budget", type=int, default=10_000)
    p.set_defaults(handler=_search)

    p = commands.add_parser("oracle", help="brute force at desk scale")
    oracle = p.add_subparsers(dest="action", required=True)
    for action in ("enumerate", "partition"):
        o = oracle.add_parser(action)
        o.add_argument("--kind", choices=["GL", "SL", "PGL", "PSL", "Sp", "SO"], default="PSL")
        o.add_argument("--n", type=int, required=True)
        o.add_argument("--q", type=int, required=True)
        if action == "partition":
            o.add_argument("--twist", choices=["theta", "id"], default="theta")
    o = oracle.add_parser("typed")
    _add_orbit(o)
    for action in ("theorem51", "count"):
        o = oracle.add_parser(action)
        o.add_argument("--n", type=int, required=True)
        o.add_argument("--q", type=int, required=True)
    p.set_defaults(handler=_oracle)
    return parser


def _command_name(args: argparse.Namespace) -> str:
    action = getattr(args, "action", None)
    return f"{args.command} {action}" if action else args.command


def _inputs(args: argparse.Namespace) -> dict[str, Any]:
    return {
        key: str(value) if isinstance(value, Path) else value
        for key, value in sorted(vars(args).items())
        if key not in GLOBAL_OPTIONS and value is not None
    }


def _emit(record: ReportRecord, stream: TextIO) -> None:
    stream.write(record.model_dump_json() + "\n")
    stream.flush()


def run(argv: list[str] | None = None, stream: TextIO | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        settings = _settings(args)
    except (ServiceError, ValueError) as exc:
        print(f"twistrack: invalid settings: {exc}", file=sys.stderr)
        return 2
    configure_logging(settings.log_level)

    handler: Callable[[argparse.Namespace, Settings], Outcome] = args.handler
    command = _command_name(args)
    started = time.perf_counter()
    try:
        result = handler(args, settings)
        code = 0 if result.ok else 1
    except ServiceError as exc:
        logger.error("%s failed: %s", command, exc)
        result = Outcome(f"error: {type(exc).__name__}", {"message": str(exc)}, ok=False)
        code = 1
    except ValidationError as exc:
        logger.error("%s rejected its input: %s", command, exc)
        result = Outcome("error: InvalidInput", {"message": str(exc)}, ok=False)
        code = 2
    record = ReportRecord(
        tool_version=__version__,
        command=command,
        inputs=_inputs(args),
        modulus=result.modulus,
        outcome=result.outcome,
        witness=result.witness,
        timing_ms=round((time.perf_counter() - started) * 1000, 3),
    )
    if args.out is not None:
        with args.out.open("a") as handle:
            _emit(record, handle)
    else:
        _emit(record, stream or sys.stdout)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
