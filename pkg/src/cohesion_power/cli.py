"""Command-line front end.

Exit codes: 0 success, 1 golden or axiom mismatch, 2 input/usage error,
3 computation error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .axioms import default_functionals, reports_to_json, run_suite
from .coalitions import GameError
from .cohesion import CohesionError
from .goldens import claim_ids, run_claims
from .scenarios import (
    BUILTIN_NAMES,
    BUILTIN_PREFIX,
    SCHEMA_VERSION,
    Dataset,
    SchemaError,
    load_dataset,
    sweep_exponent,
)
from .values import BRANCHES, MAX_EXPONENT, DegenerateDenominatorError, PowerProfile

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_COMPUTE = 3

COLUMNS = ("scenario", "branch", "b", "party", "value")
NO_FEASIBLE_NOTE = "no feasible winning coalition: every index set to 0"


class UsageError(Exception):
    pass


def fmt(x: float) -> str:
    """Six significant digits; negative zero prints as 0."""
    s = format(float(x), ".6g")
    return "0" if s == "-0" else s


def _rows(scenario: str, profiles: Sequence[PowerProfile]) -> list[tuple[str, str, str, str, str]]:
    return [
        (scenario, p.branch, fmt(p.b), label, fmt(value))
        for p in profiles
        for label, value in zip(p.players.labels, p.values)
    ]


def _metadata(dataset: Dataset, scenario: str, profiles: Sequence[PowerProfile]) -> dict[str, Any]:
    meta: dict[str, Any] = {
        "dataset": dataset.name,
        "source": dataset.source,
        "sha256": dataset.sha256,
        "schema_version": SCHEMA_VERSION,
        "scenario": scenario,
    }
    zero_at = [fmt(p.b) for p in profiles if p.zero_fallback]
    if zero_at:
        meta["note"] = NO_FEASIBLE_NOTE + (f" (b = {', '.join(zero_at)})" if len(profiles) > 1 else "")
    warnings = sorted({w for p in profiles for w in p.warnings})
    if warnings:
        meta["warnings"] = "; ".join(warnings)
    return meta


def render_table(meta: dict[str, Any], rows: Sequence[Sequence[str]], fmt_name: str) -> str:
    if fmt_name == "json":
        doc = {
            "metadata": meta,
            "columns": list(COLUMNS),
            "rows": [
                {k: (float(v) if k in ("b", "value") else v) for k, v in zip(COLUMNS, row)}
                for row in rows
            ],
        }
        return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    buf = io.StringIO()
    for key, value in meta.items():
        buf.write(f"# {key}: {value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    writer.writerows(rows)
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _exponent(text: str) -> float:
    try:
        b = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= b <= MAX_EXPONENT:
        raise argparse.ArgumentTypeError(f"exponent must lie in [0, {MAX_EXPONENT:g}], got {text}")
    return b


def _positive_int(text: str) -> int:
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if k < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {k}")
    return k


def _load(args: argparse.Namespace) -> tuple[Dataset, Any]:
    try:
        dataset = load_dataset(args.data)
    except FileNotFoundError:
        raise UsageError(f"no such file: {args.data}") from None
    try:
        scenario = dataset.scenario(args.scenario)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    return dataset, scenario


def cmd_compute(args: argparse.Namespace) -> int:
    dataset, scenario = _load(args)
    spec = scenario.with_grid(args.b, args.b, 1)
    result = sweep_exponent(dataset.parliament, spec, args.branch, dataset.sha256)
    meta = _metadata(dataset, scenario.name, result.profiles)
    _emit(render_table(meta, _rows(scenario.name, result.profiles), args.format), args.out)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    dataset, scenario = _load(args)
    if args.bmin is not None or args.bmax is not None or args.steps is not None:
        lo, hi, steps = scenario.grid or (0.0, 3.0, 61)
        lo = lo if args.bmin is None else args.bmin
        hi = hi if args.bmax is None else args.bmax
        steps = steps if args.steps is None else args.steps
        if steps == 1:
            hi = lo
        if hi < lo:
            raise UsageError(f"--bmax {hi:g} is below --bmin {lo:g}")
        scenario = scenario.with_grid(lo, hi, steps)
    result = sweep_exponent(dataset.parliament, scenario, args.branch, dataset.sha256)
    meta = _metadata(dataset, scenario.name, result.profiles)
    _emit(render_table(meta, _rows(scenario.name, result.profiles), args.format), args.out)
    return EXIT_OK


def cmd_reproduce(args: argparse.Namespace) -> int:
    selected = None
    if args.filter:
        unknown = [c for c in args.filter if c not in claim_ids()]
        if unknown:
            raise UsageError(f"unknown claim id(s) {unknown}; known: {', '.join(claim_ids())}")
        selected = args.filter
    results = run_claims(selected)
    out = [r.render() for r in results]
    failed = [r.claim for r in results if not r.ok]
    deviations = [r.claim for r in results if r.status == "DEVIATION"]
    summary = f"{len(results) - len(failed)}/{len(results)} claims ok"
    if deviations:
        summary += f"; documented deviations: {', '.join(deviations)}"
    if failed:
        summary += f"; FAILED: {', '.join(failed)}"
    out.append(summary)
    _emit("\n".join(out) + "\n", args.out)
    return EXIT_MISMATCH if failed else EXIT_OK


def cmd_check_axioms(args: argparse.Namespace) -> int:
    branches = BRANCHES if args.branch is None else (args.branch,)
    functionals = default_functionals(branches, include_countermodels=args.countermodels)
    reports = run_suite(functionals, trials=args.trials, seed=args.seed, n_range=(args.nmin, args.nmax))
    if args.format == "json":
        text = reports_to_json(reports)
    else:
        lines = [f"# seed: {args.seed}", f"# trials: {args.trials}", f"# n_range: {args.nmin}..{args.nmax}"]
        lines += [r.summary() for r in reports]
        bad = [r for r in reports if r.unexpected]
        lines.append(f"{len(reports) - len(bad)}/{len(reports)} verdicts as expected")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_MISMATCH if any(r.unexpected for r in reports) else EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage errors exit with EXIT_USAGE
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="cohesion-power",
        description="Cohesion-weighted Shapley and Banzhaf power indices for weighted voting games.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def data_args(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--data", required=True,
            help=f"scenario YAML file or {BUILTIN_PREFIX}NAME ({', '.join(BUILTIN_NAMES)})",
        )
        p.add_argument("--scenario", required=True, help="scenario name inside the document")
        p.add_argument("--branch", choices=BRANCHES, help="override the scenario's branch")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", help="write to this file instead of stdout")

    p = sub.add_parser("compute", help="one normalized index profile")
    data_args(p)
    p.add_argument("--b", type=_exponent, required=True, help="cohesion exponent")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("sweep", help="index profiles over a grid of exponents")
    data_args(p)
    p.add_argument("--bmin", type=_exponent)
    p.add_argument("--bmax", type=_exponent)
    p.add_argument("--steps", type=_positive_int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("reproduce", help="check the bundled reference values")
    p.add_argument("--filter", action="append", metavar="CLAIM_ID", help="only this claim (repeatable)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("check-axioms", help="randomized axiom checks")
    p.add_argument("--branch", choices=BRANCHES)
    p.add_argument("--trials", type=_positive_int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--nmin", type=int, default=2, choices=range(2, 9), metavar="N")
    p.add_argument("--nmax", type=int, default=6, choices=range(2, 9), metavar="N")
    p.add_argument("--countermodels", action="store_true", help="also run the four countermodels")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_check_axioms)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "nmin", 2) > getattr(args, "nmax", 2):
        parser.error(f"--nmin {args.nmin} exceeds --nmax {args.nmax}")
    try:
        return args.func(args)
    except (UsageError, SchemaError, GameError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DegenerateDenominatorError, CohesionError, ArithmeticError, ValueError) as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
