"""Differential testing of the happening-sequence checker against the reference semantics.

Random small ground problems and plans are generated from a seed; both checkers run on each and every disagreement,
in verdict or in final state, is reported with a minimised reproducer.
"""

from __future__ import annotations

import logging
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence, TypeVar

from .enums import InvariantSemantics, Mutation
from .exceptions import ValidationError
from .grounding import (
    TOP,
    And,
    Atom,
    Formula,
    GroundAction,
    GroundAtom,
    GroundDurativeAction,
    GroundProblem,
    Not,
    Or,
    PlanEntry,
    SnapAction,
    TemporalPlan,
)
from .models import DiffTestReport, Disagreement, SizeBounds
from .mutants import run_pipeline, run_reference
from .rational import render_rational
from .semantics import State
from .validator import Placement, midpoint, simplify_plan, valid_hap_seq

__all__ = (
    "SCALE_FACTOR",
    "Case",
    "case_rng",
    "check_scale_invariance",
    "compare",
    "describe_case",
    "difftest",
    "generate_case",
    "minimize",
    "pipeline_valid",
    "random_placement",
    "scale_plan",
)

logger = logging.getLogger(__name__)

SCALE_FACTOR = Fraction(1, 10**9)

T = TypeVar("T")

_DENOMINATORS = (1, 2, 4, 8, 3, 6, 5, 7)


@dataclass(frozen=True)
class Case:
    """A generated ground problem and a plan over its actions."""

    index: int
    problem: GroundProblem
    plan: TemporalPlan


def case_rng(seed: int, index: int) -> random.Random:
    return random.Random(seed * 1_000_003 + index)


def _random_formula(rng: random.Random, atoms: Sequence[GroundAtom], depth: int = 2) -> Formula:
    roll = rng.random()
    if roll < 0.4:
        return TOP
    if roll < 0.7 or depth == 0:
        return Atom(rng.choice(atoms))
    if roll < 0.8:
        return Not(Atom(rng.choice(atoms)))
    if roll < 0.92:
        return And(_random_formula(rng, atoms, depth - 1), _random_formula(rng, atoms, depth - 1))
    return Or(_random_formula(rng, atoms, depth - 1), _random_formula(rng, atoms, depth - 1))


def _random_snap(rng: random.Random, atoms: Sequence[GroundAtom], label: str) -> SnapAction:
    add = set(rng.sample(atoms, rng.randint(0, min(2, len(atoms)))))
    delete = set(rng.sample(atoms, rng.randint(0, min(2, len(atoms)))))
    if rng.random() < 0.85:
        delete -= add
    return SnapAction(_random_formula(rng, atoms), frozenset(add), frozenset(delete), label)


def _random_action(rng: random.Random, atoms: Sequence[GroundAtom], i: int) -> GroundAction:
    if rng.random() < 0.2:
        return _random_snap(rng, atoms, f"(s{i})")
    label = f"(a{i})"
    inv = _random_formula(rng, atoms, depth=1) if rng.random() < 0.6 else TOP
    return GroundDurativeAction(
        _random_snap(rng, atoms, f"{label}_start"), _random_snap(rng, atoms, f"{label}_end"), inv, label
    )


def _random_rational(rng: random.Random, bounds: SizeBounds) -> Fraction:
    den = rng.choice([d for d in _DENOMINATORS if d <= bounds.max_denominator])
    return Fraction(rng.randint(0, bounds.max_time * den), den)


def generate_case(rng: random.Random, bounds: Optional[SizeBounds] = None, index: int = 0) -> Case:
    """Generates a random ground problem and plan within `bounds`.

    Args:
        rng (random.Random): Source of randomness.
        bounds (Optional[SizeBounds]): Size bounds. Defaults to None for `SizeBounds()`.
        index (int): Number of the case within its run. Defaults to 0.

    Returns:
        Case: The generated case.
    """
    bounds = bounds or SizeBounds()
    atoms = [GroundAtom(f"p{i}") for i in range(rng.randint(1, bounds.max_atoms))]
    actions = [_random_action(rng, atoms, i) for i in range(rng.randint(1, bounds.max_actions))]
    init = frozenset(a for a in atoms if rng.random() < 0.5)
    goal = _random_formula(rng, atoms, depth=1)
    entries = []
    for _ in range(rng.randint(0, bounds.max_steps)):
        action = rng.choice(actions)
        duration = _random_rational(rng, bounds) if isinstance(action, GroundDurativeAction) else None
        entries.append(PlanEntry(action, _random_rational(rng, bounds), duration))
    problem = GroundProblem(frozenset(atoms), tuple(actions), init, goal)
    return Case(index, problem, TemporalPlan(tuple(entries)))


def _rendered(state: Optional[State]) -> Optional[list[str]]:
    return None if state is None else sorted(map(str, state))


def compare(
    case: Case, semantics: InvariantSemantics | str = InvariantSemantics.RightClosed, mutation: Optional[Mutation] = None
) -> Optional[Disagreement]:
    """Runs both checkers on a case.

    Returns:
        Optional[Disagreement]: None when verdicts, executability and final states all agree.
    """
    reference = run_reference(case.problem, case.plan, semantics, mutation)
    pipeline = run_pipeline(case.problem, case.plan, semantics, mutation)
    reference_valid = reference is not None and case.problem.goal.sat(reference)
    pipeline_valid = pipeline is not None and case.problem.goal.sat(pipeline)
    if reference_valid == pipeline_valid and reference == pipeline:
        return None
    return Disagreement(
        case=case.index,
        reference_valid=reference_valid,
        pipeline_valid=pipeline_valid,
        reference_state=_rendered(reference),
        pipeline_state=_rendered(pipeline),
    )


def _without(items: Sequence[T], i: int) -> list[T]:
    return [*items[:i], *items[i + 1 :]]


def _shrink(items: list[T], still_fails: Callable[[list[T]], bool]) -> list[T]:
    i = 0
    while i < len(items):
        candidate = _without(items, i)
        if still_fails(candidate):
            items = candidate
        else:
            i += 1
    return items


def minimize(case: Case, fails: Callable[[Case], bool]) -> Case:
    """Greedily drops plan entries, then initial atoms, while `fails` keeps holding.

    Args:
        case (Case): A failing case.
        fails (Callable[[Case], bool]): The failure predicate.

    Returns:
        Case: A case from which no single entry or initial atom can be dropped.
    """

    def with_entries(entries: list[PlanEntry]) -> Case:
        return replace(case, plan=TemporalPlan(tuple(entries)))

    entries = _shrink(list(case.plan.entries), lambda e: fails(with_entries(e)))
    case = with_entries(entries)

    def with_init(init: list[GroundAtom]) -> Case:
        return replace(case, problem=replace(case.problem, init=frozenset(init)))

    init = _shrink(sorted(case.problem.init), lambda i: fails(with_init(i)))
    return with_init(init)


def _describe_action(action: GroundAction) -> list[str]:
    if isinstance(action, SnapAction):
        snaps = [action]
        lines = [f"  {action}"]
    else:
        snaps = [action.start, action.end]
        lines = [f"  {action}  inv {action.inv}"]
    for snap in snaps:
        add = " ".join(sorted(map(str, snap.add)))
        delete = " ".join(sorted(map(str, snap.delete)))
        lines.append(f"    {snap}: pre {snap.pre}  add [{add}]  del [{delete}]")
    return lines


def describe_case(case: Case) -> str:
    """Human-readable dump of a case: atoms, initial state, goal, actions and plan."""
    problem = case.problem
    lines = [
        f"atoms: {' '.join(sorted(map(str, problem.atoms)))}",
        f"init: {' '.join(sorted(map(str, problem.init)))}",
        f"goal: {problem.goal}",
        "actions:",
    ]
    for action in problem.actions:
        lines.extend(_describe_action(action))
    lines.append("plan:")
    for entry in case.plan:
        duration = f"[{render_rational(entry.duration)}]" if entry.duration is not None else ""
        lines.append(f"  {render_rational(entry.time)}: {entry.action}{duration}")
    return "\n".join(lines)


def _run_chunk(
    seed: int, indices: Sequence[int], bounds: SizeBounds, semantics: InvariantSemantics, mutation: Optional[Mutation]
) -> list[Disagreement]:
    found = []
    for index in indices:
        case = generate_case(case_rng(seed, index), bounds, index)
        disagreement = compare(case, semantics, mutation)
        if disagreement is None:
            continue
        small = minimize(case, lambda c: compare(c, semantics, mutation) is not None)
        found.append(disagreement.model_copy(update={"reproducer": describe_case(small)}))
    return found


def _chunks(count: int, parts: int) -> Iterator[range]:
    size = -(-count // parts)
    for start in range(0, count, size):
        yield range(start, min(start + size, count))


def difftest(
    seed: int,
    count: int,
    bounds: Optional[SizeBounds] = None,
    semantics: InvariantSemantics | str = InvariantSemantics.RightClosed,
    mutation: Optional[Mutation | str] = None,
    workers: int = 1,
) -> DiffTestReport:
    """Runs `count` random cases through both checkers.

    Case `i` is generated from `seed` and `i` alone, so a run is reproducible whatever the number of workers.

    Args:
        seed (int): Seed of the run.
        count (int): Number of cases.
        bounds (Optional[SizeBounds]): Size bounds of the cases. Defaults to None for `SizeBounds()`.
        semantics (InvariantSemantics | str): Invariant interval. Defaults to right-closed.
        mutation (Optional[Mutation | str]): Bug to inject into one of the checkers. Defaults to None.
        workers (int): Number of worker processes. Defaults to 1 for in-process execution.

    Returns:
        DiffTestReport: The disagreements found, sorted by case number.
    """
    if count < 0 or workers < 1:
        raise ValueError("count must be non-negative and workers positive")
    bounds = bounds or SizeBounds()
    semantics = InvariantSemantics(semantics)
    mutation = Mutation(mutation) if mutation is not None else None
    start = time.perf_counter()

    disagreements: list[Disagreement] = []
    if workers == 1 or count < 2:
        disagreements = _run_chunk(seed, range(count), bounds, semantics, mutation)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_run_chunk, seed, chunk, bounds, semantics, mutation) for chunk in _chunks(count, workers)
            ]
            for future in futures:
                disagreements.extend(future.result())
    disagreements.sort(key=lambda d: d.case)

    logger.debug("Difftest seed=%d count=%d found %d disagreements", seed, count, len(disagreements))
    return DiffTestReport(
        seed=seed,
        count=count,
        semantics=semantics,
        mutation=mutation,
        disagreements=disagreements,
        duration_seconds=time.perf_counter() - start,
    )


def random_placement(rng: random.Random) -> Placement:
    """A placement that puts each invariant check at a random rational point strictly inside its gap."""

    def place(lo: Fraction, hi: Fraction) -> Fraction:
        return lo + (hi - lo) * Fraction(rng.randint(1, 99), 100)

    return place


def scale_plan(plan: TemporalPlan, factor: Fraction = SCALE_FACTOR) -> TemporalPlan:
    """Multiplies every time and duration of the plan by `factor`."""
    if factor <= 0:
        raise ValueError("factor must be positive")
    return TemporalPlan(
        tuple(
            PlanEntry(e.action, e.time * factor, e.duration * factor if e.duration is not None else None)
            for e in plan
        )
    )


def pipeline_valid(
    problem: GroundProblem,
    plan: TemporalPlan,
    semantics: InvariantSemantics | str = InvariantSemantics.RightClosed,
    placement: Optional[Placement] = None,
) -> bool:
    try:
        state = valid_hap_seq(simplify_plan(plan, semantics, placement or midpoint), problem)
    except ValidationError:
        return False
    return problem.goal.sat(state)


def check_scale_invariance(
    case: Case, semantics: InvariantSemantics | str = InvariantSemantics.RightClosed, factor: Fraction = SCALE_FACTOR
) -> bool:
    """Whether scaling the plan's times and durations by `factor` leaves the verdict unchanged."""
    return pipeline_valid(case.problem, case.plan, semantics) == pipeline_valid(
        case.problem, scale_plan(case.plan, factor), semantics
    )
