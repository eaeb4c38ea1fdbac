"""Command line interface: ``bitriple verify | table | h0``.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for unreadable
or malformed input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Sequence

from bitriple.constructions import (
    BUILTIN_NAMES,
    FIRST_TABLE,
    ConstructionReport,
    PipelineFailure,
    SpecError,
    builtin,
    run_pipeline,
)
from bitriple.cover import CoverError
from bitriple.linsys import DEFAULT_PRIME, ConfigurationError, H0Oracle
from bitriple.picard import LatticeError, format_class, parse_class
from bitriple.specfile import SpecFileError, load_spec_file

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

log = logging.getLogger("bitriple")


def _add_common(parser: argparse.ArgumentParser) -> None:
    # SUPPRESS keeps a flag given before the subcommand from being reset by the subparser
    parser.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS, help="output format")
    parser.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="configuration seed (default 0)")
    parser.add_argument("--trials", type=int, default=argparse.SUPPRESS, help="independent configurations (default 5)")
    parser.add_argument("--prime", type=int, default=argparse.SUPPRESS, help=f"field modulus (default {DEFAULT_PRIME})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bitriple",
        description="Verify Z3^2-cover constructions of surfaces whose canonical map has degree 3.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    _add_common(parser)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the full pipeline on a spec file")
    p.add_argument("file")
    _add_common(p)

    p = sub.add_parser("table", help="print the table rows of the built-in constructions")
    p.add_argument("--only", choices=BUILTIN_NAMES, help="a single construction")
    _add_common(p)

    p = sub.add_parser("h0", help="h^0 of a divisor class on the surface of a spec file")
    p.add_argument("expr", help='class expression, e.g. "-K" or "K + L01"')
    p.add_argument("--spec", required=True, help="spec file providing the surface (and L classes)")
    _add_common(p)
    return parser


def _oracle_overrides(args: argparse.Namespace) -> dict:
    return {k: getattr(args, k) for k in ("seed", "trials", "prime") if hasattr(args, k)}


def _report_json(report: ConstructionReport) -> dict:
    X = report.X
    census = report.census
    canonical = report.canonical
    return {
        "construction": report.name,
        "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in report.checks],
        "invariants": {
            "K2": X.K2 if X else None,
            "pg": X.pg if X else None,
            "q": X.q if X else None,
            "chi": X.chi if X else None,
        },
        "census": {"n": census.n if census else None, "m": census.m if census else None},
        "base_points": report.base_points,
        "deg_sigma": canonical.deg_sigma if canonical else None,
        "assumptions": list(report.assumptions) + list(report.notes),
    }


def _report_text(report: ConstructionReport, failure: PipelineFailure | None) -> str:
    lines = [f"construction {report.name}"]
    for c in report.checks:
        mark = "ok  " if c.passed else "FAIL"
        lines.append(f"  [{mark}] {c.name}" + (f"  ({c.detail})" if c.detail else ""))
    if report.X is not None:
        X = report.X
        lines.append(f"  X:   K^2 = {X.K2}, p_g = {X.pg}, q = {X.q}, chi = {X.chi}")
    if report.census is not None:
        lines.append(f"  census: n = {report.census.n} A2 points, m = {report.census.m} 1/3(1,1) points")
    if report.X1 is not None:
        X1 = report.X1
        lines.append(f"  X1~: K^2 = {X1.K2}, p_g = {X1.pg}, q = {X1.q}, chi = {X1.chi}")
    if report.row is not None:
        lines.append(f"  row (K^2, p_g, q, deg Sigma, base points) = {report.row.as_tuple()}")
    for a in list(report.assumptions) + list(report.notes):
        lines.append(f"  assumption: {a}")
    if failure is not None:
        lines.append(f"FAILED at stage '{failure.stage}': {failure.message}")
    return "\n".join(lines)


def command_verify(args: argparse.Namespace, out) -> int:
    fmt = getattr(args, "format", "text")
    try:
        sf = load_spec_file(args.file)
    except (SpecFileError, SpecError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if sf.construction is None:
        print(f"error: {args.file} describes only a surface; nothing to verify", file=sys.stderr)
        return EXIT_INPUT
    spec = sf.construction
    failure = None
    try:
        report = run_pipeline(spec, spec.oracle(**_oracle_overrides(args)))
    except PipelineFailure as exc:
        failure, report = exc, exc.report
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if fmt == "json":
        print(json.dumps(_report_json(report), indent=2), file=out)
    else:
        print(_report_text(report, failure), file=out)
    if failure is not None:
        print(f"check failed: {failure}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _fmt(v) -> str:
    return "-" if v is None else str(v)


def command_table(args: argparse.Namespace, out) -> int:
    fmt = getattr(args, "format", "text")
    names = [args.only] if args.only else list(BUILTIN_NAMES)
    rows = []
    status = EXIT_OK
    for name in names:
        spec = builtin(name)
        entry = {"construction": name, "table": 1 if name in FIRST_TABLE else 2}
        try:
            report = run_pipeline(spec, spec.oracle(**_oracle_overrides(args)))
            row = report.row.as_tuple()
        except (PipelineFailure, ConfigurationError) as exc:
            log.error("%s: %s", name, exc)
            row = (None,) * 5
        entry.update(zip(("K2", "pg", "q", "deg_sigma", "base_points"), row))
        matches = spec.expected is not None and spec.expected.row.as_tuple() == row
        entry["matches_expected"] = matches
        if not matches:
            status = EXIT_FAIL
        rows.append(entry)
    if fmt == "json":
        print(json.dumps(rows, indent=2), file=out)
        return status
    header = f"{'construction':<13}{'K^2':>5}{'p_g':>5}{'q':>4}{'deg Sigma':>11}{'base points':>13}  match"
    for table in (1, 2):
        part = [r for r in rows if r["table"] == table]
        if not part:
            continue
        print(f"Table {table}: canonical map of degree 3", file=out)
        print(header, file=out)
        for r in part:
            print(
                f"{r['construction']:<13}{_fmt(r['K2']):>5}{_fmt(r['pg']):>5}{_fmt(r['q']):>4}"
                f"{_fmt(r['deg_sigma']):>11}{_fmt(r['base_points']):>13}  {'yes' if r['matches_expected'] else 'NO'}",
                file=out,
            )
        print(file=out)
    return status


def command_h0(args: argparse.Namespace, out) -> int:
    fmt = getattr(args, "format", "text")
    try:
        sf = load_spec_file(args.spec)
        args.expr = args.expr.strip()
        cls = parse_class(args.expr, sf.surface, sf.symbols())
    except (SpecFileError, SpecError, LatticeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    defaults = sf.construction.oracle() if sf.construction is not None else H0Oracle()
    opts = _oracle_overrides(args)
    oracle = H0Oracle(
        prime=opts.get("prime", defaults.prime),
        seed=opts.get("seed", defaults.seed),
        trials=opts.get("trials", defaults.trials),
    )
    try:
        value = oracle.h0(cls, sf.surface)
    except (ConfigurationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if fmt == "json":
        payload = {
            "expression": args.expr,
            "class": format_class(cls),
            "h0": value,
            "trials": oracle.trials,
            "seed": oracle.seed,
            "prime": oracle.prime,
        }
        print(json.dumps(payload, indent=2), file=out)
    else:
        print(f"h0({args.expr}) = {value}    [{format_class(cls)}; {oracle.trials} trials, seed {oracle.seed}]", file=out)
    return EXIT_OK


_FLAGS = ("-h", "--help", "-v", "--verbose", "--spec", "--format", "--seed", "--trials", "--prime", "--only")


def _protect_expressions(argv: list[str]) -> list[str]:
    """Let ``h0 "-K"`` through: a leading space stops argparse reading it as an option."""
    if "h0" not in argv:
        return argv
    start = argv.index("h0") + 1
    out = argv[:start]
    for tok in argv[start:]:
        if tok.startswith("-") and tok.split("=")[0] not in _FLAGS and not tok.lstrip("-").isdigit():
            tok = " " + tok
        out.append(tok)
    return out


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(_protect_expressions(argv))
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    handlers = {"verify": command_verify, "table": command_table, "h0": command_h0}
    try:
        return handlers[args.command](args, out)
    except CoverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
