"""Deliberately broken variants of the two checkers.

Each `Mutation` injects one semantic bug into either the reference semantics or the happening-sequence pipeline.
Differential testing must tell every mutant apart from the correct checker on some generated case.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import AbstractSet, Iterable, Optional

from .enums import InvariantSemantics, Mutation, ValidationErrorKind
from .exceptions import ValidationError
from .grounding import Formula, GroundAtom, GroundDurativeAction, GroundProblem, PlanEntry, SnapAction, TemporalPlan
from .semantics import State, apply_effects, happening_time_points, non_interfering, reference_run, snap_set_at
from .validator import (
    Happening,
    HappeningSequence,
    _ranks,
    _right_closed,
    _snap_insertions,
    midpoint,
    simplify_plan,
    valid_hap_seq,
)

__all__ = ("REFERENCE_MUTATIONS", "run_pipeline", "run_reference")

REFERENCE_MUTATIONS = frozenset({Mutation.InvariantOffByOne})


def _closed_invariants_at(t: Fraction, plan: Iterable[PlanEntry]) -> set[Formula]:
    # closed on the left as well: the invariant is also required before the start snap executes
    return {
        entry.action.inv
        for entry in plan
        if isinstance(entry.action, GroundDurativeAction) and entry.time <= t <= entry.end
    }


def _add_then_delete(actions: Iterable[SnapAction], state: AbstractSet[GroundAtom]) -> State:
    actions = list(actions)
    added: set[GroundAtom] = set().union(*(a.add for a in actions))
    deleted: set[GroundAtom] = set().union(*(a.delete for a in actions))
    return frozenset((set(state) | added) - deleted)


def _reference_off_by_one(problem: GroundProblem, plan: TemporalPlan) -> Optional[State]:
    state: State = problem.init
    for t in happening_time_points(plan):
        snaps = snap_set_at(t, plan)
        if not all(phi.sat(state) for phi in _closed_invariants_at(t, plan)):
            return None
        if not all(a.pre.sat(state) for a in snaps):
            return None
        if not all(non_interfering(a, b) for a, b in combinations(snaps, 2)):
            return None
        state = apply_effects(snaps, state)
    return state


def _simplify_mutated(plan: TemporalPlan, semantics: InvariantSemantics | str, mutation: Mutation) -> HappeningSequence:
    htps = happening_time_points(plan)
    ranks = _ranks(htps)
    right_closed = _right_closed(semantics)
    slots: dict[Fraction, set[SnapAction]] = {}
    for entry in plan:
        end = entry.action.end if isinstance(entry.action, GroundDurativeAction) else None
        for _, t, snap in _snap_insertions(htps, ranks, entry, right_closed, midpoint):
            if mutation == Mutation.MissedEndSnap and snap is end and t in slots:
                continue
            slots.setdefault(t, set()).add(snap)
    # unsorted: happenings stay in first-insertion order
    times = list(slots) if mutation == Mutation.UnsortedHappenings else sorted(slots)
    return tuple(Happening(t, frozenset(slots[t])) for t in times)


def _execute_mutated(happenings: HappeningSequence, problem: GroundProblem, mutation: Mutation) -> State:
    state = problem.init
    for step, happening in enumerate(happenings, start=1):
        acts = sorted(happening.acts, key=str)
        if mutation != Mutation.SkippedInterference:
            for a, b in combinations(acts, 2):
                if not non_interfering(a, b):
                    raise ValidationError(ValidationErrorKind.Interference, step, happening.time, (str(a), str(b)))
        for a in acts:
            if not a.pre.sat(state):
                raise ValidationError(ValidationErrorKind.PreconditionUnsatisfied, step, happening.time, (str(a),))
        state = _add_then_delete(acts, state) if mutation == Mutation.DeleteAfterAdd else apply_effects(acts, state)
    return state


def run_reference(
    problem: GroundProblem,
    plan: TemporalPlan,
    semantics: InvariantSemantics | str = InvariantSemantics.RightClosed,
    mutation: Optional[Mutation] = None,
) -> Optional[State]:
    """Runs the reference semantics, with the bug of `mutation` if it is a reference-side mutation.

    Returns:
        Optional[State]: The final state, or None when the plan is not executable.
    """
    if mutation == Mutation.InvariantOffByOne:
        return _reference_off_by_one(problem, plan)
    return reference_run(problem, plan, semantics)


def run_pipeline(
    problem: GroundProblem,
    plan: TemporalPlan,
    semantics: InvariantSemantics | str = InvariantSemantics.RightClosed,
    mutation: Optional[Mutation] = None,
) -> Optional[State]:
    """Builds and executes the induced happening sequence, with the bug of `mutation` if it is a pipeline-side one.

    Returns:
        Optional[State]: The final state, or None when some happening fails.
    """
    try:
        if mutation is None or mutation in REFERENCE_MUTATIONS:
            return valid_hap_seq(simplify_plan(plan, semantics), problem)
        return _execute_mutated(_simplify_mutated(plan, semantics, mutation), problem, mutation)
    except ValidationError:
        return None
