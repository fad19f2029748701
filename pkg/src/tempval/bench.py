from __future__ import annotations

import logging
import time
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .core import SUCCESS_MESSAGE, report_plan
from .enums import HappeningPath, InvariantSemantics, Verdict
from .exceptions import ValidationError
from .grounding import TOP, Atom, GroundAtom, GroundDurativeAction, GroundProblem, Not, PlanEntry, SnapAction, TemporalPlan
from .models import CorpusRun, RunReport
from .validator import check_goal, simplify_plan, simplify_plan_balanced, valid_hap_seq

__all__ = ("CORPUS_PLAN_SUFFIXES", "bench", "bench_corpus", "chain_instance", "compare_paths", "corpus_triples")

logger = logging.getLogger(__name__)

_STEP_DURATION = Fraction(1, 2)


def chain_instance(n: int) -> tuple[GroundProblem, TemporalPlan]:
    """A valid plan of `n` chained durative actions.

    Action `i` starts at time `i`, consumes `p<i>` and half a time unit later produces `p<i+1>`; `p<i>` must stay
    false while it runs. The goal is `p<n>`.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    props = [GroundAtom(f"p{i}") for i in range(n + 1)]
    actions = []
    entries = []
    for i in range(n):
        label = f"(step{i})"
        action = GroundDurativeAction(
            start=SnapAction(Atom(props[i]), delete=frozenset((props[i],)), label=f"{label}_start"),
            end=SnapAction(TOP, add=frozenset((props[i + 1],)), label=f"{label}_end"),
            inv=Not(Atom(props[i])),
            label=label,
        )
        actions.append(action)
        entries.append(PlanEntry(action, Fraction(i), _STEP_DURATION))
    problem = GroundProblem(frozenset(props), tuple(actions), frozenset((props[0],)), Atom(props[n]))
    return problem, TemporalPlan(tuple(entries))


def bench(
    n: int,
    path: HappeningPath | str = HappeningPath.Balanced,
    semantics: InvariantSemantics | str = InvariantSemantics.RightClosed,
) -> RunReport:
    """Validates the chain plan of `n` actions and reports how long it took.

    Only building and executing the happening sequence is timed; synthesising the instance is not.

    Args:
        n (int): Number of durative actions, at least 1.
        path (HappeningPath | str): Insertion path. `auto` counts as balanced. Defaults to balanced.
        semantics (InvariantSemantics | str): Invariant interval. Defaults to right-closed.

    Returns:
        RunReport: Verdict, timing and sizes of the run.
    """
    path = HappeningPath(path)
    build = simplify_plan if path == HappeningPath.List else simplify_plan_balanced
    problem, plan = chain_instance(n)

    start = time.perf_counter()
    happenings = build(plan, semantics)
    try:
        check_goal(valid_hap_seq(happenings, problem), problem)
    except ValidationError as e:
        verdict, message = Verdict.Invalid, str(e)
    else:
        verdict, message = Verdict.Valid, SUCCESS_MESSAGE
    elapsed = time.perf_counter() - start

    logger.debug("Bench n=%d on the %s path took %.4fs", n, path.value, elapsed)
    return RunReport(
        verdict=verdict,
        message=message,
        duration_seconds=elapsed,
        happening_count=len(happenings),
        step_count=len(plan),
        path=HappeningPath.List if path == HappeningPath.List else HappeningPath.Balanced,
    )


def compare_paths(
    n: int, semantics: InvariantSemantics | str = InvariantSemantics.RightClosed, paths: Optional[tuple[HappeningPath, ...]] = None
) -> dict[HappeningPath, RunReport]:
    """Runs `bench` once per insertion path."""
    return {p: bench(n, p, semantics) for p in paths or (HappeningPath.List, HappeningPath.Balanced)}


CORPUS_PLAN_SUFFIXES = (".tplan", ".plan")


def corpus_triples(directory: Path | str) -> list[tuple[Path, Path, Path]]:
    """Finds the (domain, problem, plan) files of a benchmark corpus.

    Every `*.tplan` or `*.plan` file below `directory` is a plan. It is checked against `domain.pddl` in its own
    folder and against the problem `<plan stem>.pddl` there, falling back to `problem.pddl`. Plans without both
    files are skipped with a warning.

    Args:
        directory (Path | str): Root of the corpus.

    Returns:
        list[tuple[Path, Path, Path]]: Domain, problem and plan paths, sorted by plan path.
    """
    root = Path(directory)
    if not root.is_dir():
        raise NotADirectoryError(f"Corpus '{root}' is not a directory")
    triples = []
    for plan in sorted(p for p in root.rglob("*") if p.suffix in CORPUS_PLAN_SUFFIXES and p.is_file()):
        domain = plan.with_name("domain.pddl")
        problem = next((c for c in (plan.with_suffix(".pddl"), plan.with_name("problem.pddl")) if c.is_file()), None)
        if not domain.is_file() or problem is None:
            logger.warning("Skipping %s: no domain.pddl and matching problem next to it", plan)
            continue
        triples.append((domain, problem, plan))
    return triples


def bench_corpus(
    directory: Path | str,
    semantics: InvariantSemantics | str = InvariantSemantics.RightClosed,
    path: HappeningPath | str = HappeningPath.Auto,
) -> list[CorpusRun]:
    """Checks every plan of a corpus end to end and reports verdict and time per plan.

    Timing covers parsing, grounding and validation but not reading the files.
    """
    runs = []
    for domain, problem, plan in corpus_triples(directory):
        texts = [p.read_text(encoding="utf-8") for p in (domain, problem, plan)]
        report = report_plan(*texts, semantics=semantics, path=path)
        logger.debug("Corpus plan %s: %s in %.4fs", plan, report.verdict.value, report.duration_seconds)
        runs.append(CorpusRun(plan=plan, domain=domain, problem=problem, report=report))
    return runs
