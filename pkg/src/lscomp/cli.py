"""Command-line front end: analyze | build | certify | simulate | tradeoff.

Every emission embeds the tool version, modulus, seed and assignment hash so
any run can be replayed exactly. Exit codes: 0 success, 2 input error,
3 construction failure, 4 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import secrets
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .assignment import Assignment, AssignmentError, Cost, bundled_path
from .prime_field import FieldSpec
from .scheme import (
    ConstructionError,
    HallInfeasibleError,
    build,
    certificate_realization,
    verify_decodability,
    verify_encodability,
)
from .simulate import run_monte_carlo
from .structure import analyze, fraction_decimal, tradeoff_curve

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONSTRUCTION = 3
EXIT_VERIFICATION = 4


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (AssignmentError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except HallInfeasibleError as exc:
        print(f"structural failure: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    except ConstructionError as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lscomp",
        description=(
            "Computable-dimension analysis and exact code construction for "
            "master/worker linearly separable computation with an arbitrary "
            "heterogeneous data assignment."
        ),
    )
    parser.add_argument("--version", action="version", version=f"lscomp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seeded=True):
        p.add_argument(
            "assignment",
            help="path to a .dam file, or bundled:<name> (bundled:ex851, bundled:footnote3)",
        )
        p.add_argument("--modulus", type=int, default=None, help="prime field modulus")
        p.add_argument(
            "--format", choices=("json", "csv", "text"), default="text", dest="fmt"
        )
        p.add_argument("--out", type=Path, default=None, help="write output here instead of stdout")
        if seeded:
            p.add_argument(
                "--seed", type=int, default=None,
                help="RNG seed (default: randomly drawn, echoed in the output)",
            )

    p = sub.add_parser("analyze", help="structure report for one cost")
    common(p)
    p.add_argument("--cost", required=True, help="communication cost, integer or p/q")
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser("build", help="construct the code and verify it")
    common(p)
    p.add_argument("--cost", required=True)
    p.add_argument(
        "--matrices", choices=("full", "omit"), default="full",
        help="omit stores only dimensions + seed for replay",
    )
    p.set_defaults(handler=cmd_build)

    p = sub.add_parser("certify", help="deterministic identity/MDS realization")
    common(p)
    p.add_argument("--cost", required=True)
    p.add_argument("--matrices", choices=("full", "omit"), default="full")
    p.set_defaults(handler=cmd_certify)

    p = sub.add_parser("simulate", help="Monte-Carlo end-to-end recovery trials")
    common(p)
    p.add_argument("--cost", required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--length", type=int, default=64, help="message length in symbols")
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("tradeoff", help="dimension-vs-cost table")
    common(p)
    p.add_argument("--costs", help="comma-separated list, e.g. 1/2,1,3/2,2")
    p.add_argument("--cost-range", dest="cost_range", help="lo..hi:step with exact rationals")
    p.set_defaults(handler=cmd_tradeoff)
    return parser


def _load_assignment(spec: str) -> Assignment:
    if spec.startswith("bundled:"):
        return Assignment.load(bundled_path(spec.split(":", 1)[1]))
    return Assignment.load(spec)


def _field(args) -> FieldSpec:
    if args.modulus is None:
        return FieldSpec()
    return FieldSpec(args.modulus)


def _seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        if args.seed < 0:
            raise ValueError("seed must be non-negative")
        return args.seed
    return secrets.randbits(48)


def _envelope(args, command: str, a: Assignment, field: FieldSpec, seed: int) -> dict:
    return {
        "tool": "lscomp",
        "version": __version__,
        "command": command,
        "modulus": str(field.modulus),
        "seed": seed,
        "assignment_sha256": a.sha256(),
        "n_workers": a.n_workers,
        "n_datasets": a.n_datasets,
    }


def _emit(args, text: str) -> int:
    if args.out is not None:
        args.out.write_text(text)
    else:
        print(text, end="" if text.endswith("\n") else "\n")
    return EXIT_OK


def _emit_json(args, payload: dict) -> int:
    return _emit(args, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _parse_costs(args) -> list[Cost]:
    if args.costs and args.cost_range:
        raise ValueError("give either --costs or --cost-range, not both")
    if args.costs:
        return [Cost.parse(tok) for tok in args.costs.split(",") if tok.strip()]
    if args.cost_range:
        body, _, step_s = args.cost_range.partition(":")
        lo_s, sep, hi_s = body.partition("..")
        if not sep or not step_s:
            raise ValueError("--cost-range expects lo..hi:step")
        lo = Cost.parse(lo_s).as_fraction()
        hi = Cost.parse(hi_s).as_fraction()
        step = Cost.parse(step_s).as_fraction()
        out = []
        c = lo
        while c <= hi:
            out.append(Cost.from_fraction(c))
            c += step
        if not out:
            raise ValueError("empty cost range")
        return out
    raise ValueError("tradeoff needs --costs or --cost-range")


def _set_text(values) -> str:
    return "{" + ",".join(str(v) for v in sorted(values)) + "}"


def cmd_analyze(args) -> int:
    a = _load_assignment(args.assignment)
    field = _field(args)
    seed = _seed(args)
    report = analyze(a, Cost.parse(args.cost))
    if args.fmt == "json":
        payload = _envelope(args, "analyze", a, field, seed)
        payload["report"] = report.to_json()
        return _emit_json(args, payload)
    if args.fmt == "csv":
        raise ValueError("csv format is only available for the tradeoff command")
    lines = [
        f"assignment: {a.n_workers} workers x {a.n_datasets} datasets "
        f"(sha256 {a.sha256()[:12]})",
        f"cost: {report.cost}",
        f"bottlenecks ({len(report.bottlenecks)}):",
    ]
    for g, qs in report.bottlenecks:
        lines.append(f"  workers {_set_text(g)}  datasets {_set_text(qs)}")
    lines += [
        f"max bottleneck size: {report.max_bottleneck_size}",
        f"bottleneck workers: {_set_text(report.bottleneck_workers)}",
        f"max column zeros: {report.max_column_zeros}",
        f"replication: {report.replication}",
        f"dimension converse: {fraction_decimal(report.dimension_converse)}",
        f"dimension achievable: {fraction_decimal(report.dimension_achievable)} "
        f"({report.achievable_pieces} piece rows)",
        f"dimension repetition: {fraction_decimal(report.dimension_repetition)}",
        f"optimal: {'yes' if report.optimal else 'no'}",
    ]
    return _emit(args, "\n".join(lines) + "\n")


def cmd_build(args) -> int:
    a = _load_assignment(args.assignment)
    field = _field(args)
    seed = _seed(args)
    scheme = build(a, Cost.parse(args.cost), seed, field)
    enc = verify_encodability(scheme)
    dec = verify_decodability(scheme)
    payload = _envelope(args, "build", a, field, seed)
    payload["scheme"] = scheme.to_json(include_matrices=(args.matrices == "full"))
    payload["encodability"] = enc.to_json()
    payload["decodability"] = dec.to_json()
    if args.fmt == "json":
        code = _emit_json(args, payload)
    elif args.fmt == "csv":
        raise ValueError("csv format is only available for the tradeoff command")
    else:
        lines = [
            f"built scheme: cost {scheme.cost}, {scheme.task_rows} task rows, "
            f"seed {seed}, retries {scheme.retries_used}",
            f"encodability: {'ok' if enc.ok else f'{len(enc.violations)} violations'} "
            f"({enc.checked_columns} columns checked)",
            f"decodability: rank {dec.stack_rank}/{dec.required_rank}, "
            f"task recovery {'exact' if dec.recovers_task else 'BROKEN'}",
        ]
        code = _emit(args, "\n".join(lines) + "\n")
    if not (enc.ok and dec.ok):
        print("verification failed on the built scheme", file=sys.stderr)
        return EXIT_VERIFICATION
    return code


def cmd_certify(args) -> int:
    a = _load_assignment(args.assignment)
    field = _field(args)
    seed = _seed(args)
    witness = certificate_realization(a, Cost.parse(args.cost), seed, field)
    payload = _envelope(args, "certify", a, field, seed)
    payload["witness"] = witness.to_json(include_matrices=(args.matrices == "full"))
    if args.fmt == "json":
        return _emit_json(args, payload)
    if args.fmt == "csv":
        raise ValueError("csv format is only available for the tradeoff command")
    is_identity = payload["witness"]["identity_stack"]
    lines = [
        f"certificate: case {witness.case}, stack rank "
        f"{witness.stack_rank}/{witness.ordered_stack.rows}",
        f"worker order (outside bottleneck first): {list(witness.worker_order)}",
        f"reordered stack is identity: {'yes' if is_identity else 'no'}",
    ]
    return _emit(args, "\n".join(lines) + "\n")


def cmd_simulate(args) -> int:
    a = _load_assignment(args.assignment)
    field = _field(args)
    seed = _seed(args)
    result = run_monte_carlo(
        a, Cost.parse(args.cost), args.length, args.trials, seed, field
    )
    payload = _envelope(args, "simulate", a, field, seed)
    payload["monte_carlo"] = result.to_json()
    payload["length"] = args.length
    if args.fmt == "json":
        code = _emit_json(args, payload)
    elif args.fmt == "csv":
        raise ValueError("csv format is only available for the tradeoff command")
    else:
        code = _emit(args, result.summary() + "\n")
    if not result.ok:
        print(f"{result.failures} trials failed to recover exactly", file=sys.stderr)
        return EXIT_VERIFICATION
    return code


def cmd_tradeoff(args) -> int:
    a = _load_assignment(args.assignment)
    field = _field(args)
    seed = _seed(args)
    points = tradeoff_curve(a, _parse_costs(args))
    if args.fmt == "json":
        payload = _envelope(args, "tradeoff", a, field, seed)
        payload["points"] = [pt.to_json() for pt in points]
        return _emit_json(args, payload)
    if args.fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(
            [
                "cost", "cost_p", "cost_q",
                "dimension_converse", "converse_p", "converse_q",
                "dimension_achievable", "achievable_p", "achievable_q",
                "dimension_repetition", "repetition_p", "repetition_q",
            ]
        )
        for pt in points:
            row = []
            for fr in (
                pt.cost.as_fraction(),
                pt.dimension_converse,
                pt.dimension_achievable,
                pt.dimension_repetition,
            ):
                row += [fraction_decimal(fr), fr.numerator, fr.denominator]
            writer.writerow(row)
        return _emit(args, buf.getvalue())
    width = max(len(str(pt.cost)) for pt in points)
    lines = [f"{'cost':>{width}}  converse  achievable  repetition"]
    for pt in points:
        lines.append(
            f"{str(pt.cost):>{width}}  "
            f"{fraction_decimal(pt.dimension_converse):>8}  "
            f"{fraction_decimal(pt.dimension_achievable):>10}  "
            f"{fraction_decimal(pt.dimension_repetition):>10}"
        )
    return _emit(args, "\n".join(lines) + "\n")


if __name__ == "__main__":
    sys.exit(main())
