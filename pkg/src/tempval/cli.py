"""Command-line interface.

Exit codes: 0 for a valid plan, 1 for an invalid or ill-formed one (and for differential-testing disagreements),
2 for parse and I/O errors, 64 for usage errors. Verdicts go to standard output, diagnostics to standard error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import NoReturn, Optional, Sequence

from . import __version__
from .bench import bench_corpus, compare_paths
from .core import SUCCESS_MESSAGE, PlanValidator, report_plan, verdict_of
from .difftest import difftest
from .enums import HappeningPath, InvariantSemantics, Mutation, Verdict
from .exceptions import TempvalError
from .models import SizeBounds
from .validator import format_happenings

__all__ = ("EXIT_CODES", "EXIT_USAGE", "main")

logger = logging.getLogger(__name__)

EXIT_CODES = {
    Verdict.Valid: 0,
    Verdict.Invalid: 1,
    Verdict.IllFormed: 1,
    Verdict.ParseError: 2,
}
EXIT_IO = 2
EXIT_USAGE = 64


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _semantics_option(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--semantics",
        choices=[s.value for s in InvariantSemantics],
        default=InvariantSemantics.RightClosed.value,
        help="interval over which invariants are checked (default: %(default)s)",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="tempval", description="Validate temporal PDDL plans with exact rational time.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log debug messages to standard error")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    for name, help_text in (
        ("check", "validate a plan"),
        ("happenings", "print the happening sequence induced by a plan"),
    ):
        command = commands.add_parser(name, help=help_text)
        command.add_argument("domain", type=Path, help="PDDL domain file")
        command.add_argument("problem", type=Path, help="PDDL problem file")
        command.add_argument("plan", type=Path, help="timed plan file")
        _semantics_option(command)
        command.add_argument(
            "--path", choices=[p.value for p in HappeningPath], default=HappeningPath.Auto.value, help="insertion path"
        )

    difftest_command = commands.add_parser("difftest", help="compare the validator against the reference semantics")
    difftest_command.add_argument("--seed", type=int, default=0)
    difftest_command.add_argument("--count", type=int, default=1000)
    difftest_command.add_argument("--workers", type=int, default=1)
    difftest_command.add_argument("--mutation", choices=[m.value for m in Mutation], default=None, help="inject a bug")
    difftest_command.add_argument("--max-atoms", type=int, default=SizeBounds().max_atoms)
    difftest_command.add_argument("--max-actions", type=int, default=SizeBounds().max_actions)
    difftest_command.add_argument("--max-steps", type=int, default=SizeBounds().max_steps)
    difftest_command.add_argument("--max-denominator", type=int, default=SizeBounds().max_denominator)
    difftest_command.add_argument("--json", action="store_true", help="print the report as JSON")
    _semantics_option(difftest_command)

    bench_command = commands.add_parser("bench", help="time the validator on a synthetic chain plan or a corpus of plans")
    bench_command.add_argument("-n", type=int, default=10000, help="number of durative actions")
    bench_command.add_argument(
        "--path",
        choices=[HappeningPath.List.value, HappeningPath.Balanced.value],
        default=HappeningPath.Balanced.value,
    )
    bench_command.add_argument("--compare", action="store_true", help="run both insertion paths")
    bench_command.add_argument(
        "--corpus", type=Path, metavar="DIR", help="check every plan under DIR against its domain and problem instead"
    )
    _semantics_option(bench_command)
    return parser


def _check(args: argparse.Namespace) -> int:
    try:
        texts = [path.read_text(encoding="utf-8") for path in (args.domain, args.problem, args.plan)]
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    report = report_plan(*texts, semantics=args.semantics, path=args.path)
    logger.debug("Checked %d steps in %.4fs", report.step_count, report.duration_seconds)
    if report.ok:
        print(SUCCESS_MESSAGE)
    else:
        print(report.verdict.value)
        print(f"error: {report.message}", file=sys.stderr)
    return EXIT_CODES[report.verdict]


def _happenings(args: argparse.Namespace) -> int:
    try:
        validator = PlanValidator.from_files(args.domain, args.problem, semantics=args.semantics, path=args.path)
        happenings = validator.happenings(args.plan.read_text(encoding="utf-8"))
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except TempvalError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CODES[verdict_of(e)]
    sys.stdout.write(format_happenings(happenings))
    return 0


def _difftest(args: argparse.Namespace) -> int:
    try:
        bounds = SizeBounds(
            max_atoms=args.max_atoms,
            max_actions=args.max_actions,
            max_steps=args.max_steps,
            max_denominator=args.max_denominator,
        )
        report = difftest(args.seed, args.count, bounds, args.semantics, args.mutation, args.workers)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if args.json:
        print(report.model_dump_json(indent=2))
    else:
        print(f"{report.count} cases, {len(report.disagreements)} disagreements ({report.duration_seconds:.2f}s)")
        for d in report.disagreements:
            print(
                f"case {d.case}: reference {'valid' if d.reference_valid else 'invalid'}, "
                f"validator {'valid' if d.pipeline_valid else 'invalid'}\n{d.reproducer}",
                file=sys.stderr,
            )
    return 0 if report.ok else 1


def _bench_corpus(args: argparse.Namespace) -> int:
    try:
        runs = bench_corpus(args.corpus, args.semantics, args.path)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    if not runs:
        print(f"error: no plans found under {args.corpus}", file=sys.stderr)
        return EXIT_IO
    for run in runs:
        report = run.report
        print(
            f"{run.plan.relative_to(args.corpus)} verdict={report.verdict.value} "
            f"happenings={report.happening_count} seconds={report.duration_seconds:.4f}"
        )
    valid = sum(run.report.ok for run in runs)
    total = sum(run.report.duration_seconds for run in runs)
    print(f"{len(runs)} plans, {valid} valid ({total:.2f}s)")
    return 0 if valid == len(runs) else 1


def _bench(args: argparse.Namespace) -> int:
    if args.corpus is not None:
        return _bench_corpus(args)
    if args.n < 1:
        print("error: -n must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    paths = (HappeningPath.List, HappeningPath.Balanced) if args.compare else (HappeningPath(args.path),)
    reports = compare_paths(args.n, args.semantics, paths)
    for path, report in reports.items():
        print(
            f"n={args.n} path={path.value} verdict={report.verdict.value} "
            f"happenings={report.happening_count} seconds={report.duration_seconds:.4f}"
        )
    return 0 if all(r.ok for r in reports.values()) else 1


_COMMANDS = {"check": _check, "happenings": _happenings, "difftest": _difftest, "bench": _bench}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Runs the command line and returns its exit code.

    Args:
        argv (Optional[Sequence[str]]): Arguments without the program name. Defaults to None for `sys.argv[1:]`.

    Returns:
        int: The exit code.
    """
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    return _COMMANDS[args.command](args)
