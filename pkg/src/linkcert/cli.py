"""Command-line front end.

    linkcert run CONFIG.json [-o report.json] [--prime P] [--budget N] [--timing]
    linkcert suite DIR [-o summary.json] [--prime P] [--budget N]
                       [--threads N] [--report-dir DIR]

Exit codes for `run`: 0 for any computed verdict (certified, no-linking,
hypotheses-not-met), 2 for validation or precondition errors, 3 for budget
violations, 4 for internal inconsistencies (a certified theorem apparently
violated). `suite` exits 0 when every scenario passes, 1 otherwise.
"""
from __future__ import annotations

import argparse
import json
import pathlib
import sys

from . import __version__
from .config import ScenarioConfig
from .errors import ValidationError
from .runner import (
    EXIT_VALIDATION,
    Report,
    canonical_json,
    format_suite_table,
    run,
    run_suite,
)


def _load_config(path: str, prime: int | None, budget: int | None) -> ScenarioConfig:
    try:
        raw = json.loads(pathlib.Path(path).read_text())
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config {path} is not valid JSON: {exc}") from exc
    return ScenarioConfig.parse(raw).override(prime=prime, budget=budget)


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text + "\n")
    else:
        pathlib.Path(path).write_text(text + "\n")


def _cmd_run(args) -> int:
    try:
        config = _load_config(args.config, args.prime, args.budget)
    except ValidationError as exc:
        print(f"error [schema-invalid]: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    report = run(config)
    _write(args.output, report.canonical(include_timing=args.timing))
    if report.error_code:
        print(f"error [{report.error_code}]: {report.error_message}", file=sys.stderr)
    return report.exit_code


def _cmd_suite(args) -> int:
    directory = pathlib.Path(args.directory)
    if not directory.is_dir():
        print(f"error [schema-invalid]: {directory} is not a directory", file=sys.stderr)
        return EXIT_VALIDATION
    paths = sorted(directory.glob("*.json"))
    rows, reports = run_suite(paths, prime=args.prime, budget=args.budget, threads=args.threads)
    print(format_suite_table(rows))
    if args.report_dir:
        outdir = pathlib.Path(args.report_dir)
        outdir.mkdir(parents=True, exist_ok=True)
        for path, report in reports:
            (outdir / f"{path.stem}.report.json").write_text(report.canonical() + "\n")
    if args.output:
        summary = {
            "rows": [
                {
                    "scenario": r.filename,
                    "name": r.name,
                    "expected": r.expected,
                    "observed": r.observed,
                    "passed": r.passed,
                    "reason": r.reason,
                }
                for r in rows
            ],
            "passed": sum(r.passed for r in rows),
            "total": len(rows),
        }
        _write(args.output, canonical_json(summary))
    return 0 if all(r.passed for r in rows) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linkcert",
        description="Exact homological-linking decisions and PL critical-point certificates",
    )
    parser.add_argument("--version", action="version", version=f"linkcert {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario config and emit its report")
    p_run.add_argument("config", help="path to a scenario config (JSON)")
    p_run.add_argument("-o", "--output", default="-", help="report path (default: stdout)")
    p_run.add_argument("--prime", type=int, default=None, help="override the coefficient field prime")
    p_run.add_argument("--budget", type=int, default=None, help="override the simplex budget")
    p_run.add_argument(
        "--timing", action="store_true", help="include timing in the report (breaks byte-determinism)"
    )
    p_run.set_defaults(func=_cmd_run)

    p_suite = sub.add_parser("suite", help="run every *.json scenario in a directory")
    p_suite.add_argument("directory", help="directory of scenario configs")
    p_suite.add_argument("-o", "--output", default=None, help="write a JSON summary here")
    p_suite.add_argument("--prime", type=int, default=None, help="override the coefficient field prime")
    p_suite.add_argument("--budget", type=int, default=None, help="override the simplex budget")
    p_suite.add_argument("--threads", type=int, default=1, help="run scenarios in parallel")
    p_suite.add_argument("--report-dir", default=None, help="write per-scenario reports here")
    p_suite.set_defaults(func=_cmd_suite)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
