"""Reference semantics of temporal plans.

This is the declarative side of the validator: plan validity is decided directly from the set comprehensions that
define the snap actions happening at, and the invariants holding at, each happening time point. The happening-sequence
algorithm in `tempval.validator` reuses only the primitives defined here, so the two can be tested against each other.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from itertools import combinations
from typing import AbstractSet, Iterable, Optional

from .enums import InvariantSemantics
from .grounding import (
    Formula,
    GroundAtom,
    GroundDurativeAction,
    GroundProblem,
    PlanEntry,
    SnapAction,
    TemporalPlan,
)

__all__ = (
    "State",
    "apply_effects",
    "happening_time_points",
    "invariants_at",
    "models",
    "non_interfering",
    "reference_run",
    "reference_valid",
    "snap_set_at",
)

logger = logging.getLogger(__name__)

State = frozenset[GroundAtom]


def models(state: AbstractSet[GroundAtom], formula: Formula) -> bool:
    """Whether the state, read as the set of true atoms, is a model of the formula."""
    return formula.sat(frozenset(state))


def happening_time_points(plan: Iterable[PlanEntry]) -> list[Fraction]:
    """Sorted distinct start and end times of the plan's entries."""
    # plan order is often already time order, which keeps the sort close to linear
    points = dict.fromkeys(t for entry in plan for t in (entry.time, entry.end))
    return sorted(points)


def non_interfering(a: SnapAction, b: SnapAction) -> bool:
    """Whether two snap actions may execute at the same instant.

    Neither may touch the other's precondition atoms, and neither may add what the other deletes.
    """
    return (
        a.pre_atoms.isdisjoint(b.add | b.delete)
        and b.pre_atoms.isdisjoint(a.add | a.delete)
        and a.add.isdisjoint(b.delete)
        and b.add.isdisjoint(a.delete)
    )


def apply_effects(actions: Iterable[SnapAction], state: AbstractSet[GroundAtom]) -> State:
    """Removes every deleted atom, then adds every added atom."""
    actions = list(actions)
    deleted: set[GroundAtom] = set().union(*(a.delete for a in actions))
    added: set[GroundAtom] = set().union(*(a.add for a in actions))
    return frozenset((set(state) - deleted) | added)


def snap_set_at(t: Fraction, plan: Iterable[PlanEntry]) -> set[SnapAction]:
    """Snap actions executed at time `t`: starts and simple actions at `t`, ends at `t`."""
    result: set[SnapAction] = set()
    for entry in plan:
        action = entry.action
        if isinstance(action, GroundDurativeAction):
            if entry.time == t:
                result.add(action.start)
            if entry.end == t:
                result.add(action.end)
        elif entry.time == t:
            result.add(action)
    return result


def invariants_at(
    t: Fraction, plan: Iterable[PlanEntry], semantics: InvariantSemantics | str = InvariantSemantics.RightClosed
) -> set[Formula]:
    """Invariants that must hold in the state in which the happening at `t` executes.

    Args:
        t (Fraction): The time point.
        plan (Iterable[PlanEntry]): The plan.
        semantics (InvariantSemantics | str): `strict` requires the invariant of an action running over
            [t', t'+d] for t' < t < t'+d, `right-closed` for t' < t <= t'+d. Defaults to right-closed.

    Returns:
        set[Formula]: The invariants of every action covering `t`.
    """
    right_closed = InvariantSemantics(semantics) == InvariantSemantics.RightClosed
    result: set[Formula] = set()
    for entry in plan:
        action = entry.action
        if isinstance(action, GroundDurativeAction) and entry.time < t and (t <= entry.end if right_closed else t < entry.end):
            result.add(action.inv)
    return result


def reference_run(
    problem: GroundProblem, plan: TemporalPlan, semantics: InvariantSemantics | str = InvariantSemantics.RightClosed
) -> Optional[State]:
    """Executes the plan from the initial state under the reference semantics.

    Returns:
        Optional[State]: The state after the last happening time point, or None when some time point violates an
        invariant, a precondition or non-interference. The goal is not checked.
    """
    state: State = problem.init
    for t in happening_time_points(plan):
        snaps = snap_set_at(t, plan)
        if not all(models(state, phi) for phi in invariants_at(t, plan, semantics)):
            logger.debug("Reference: invariant violated at %s", t)
            return None
        if not all(models(state, a.pre) for a in snaps):
            logger.debug("Reference: precondition violated at %s", t)
            return None
        if not all(non_interfering(a, b) for a, b in combinations(snaps, 2)):
            logger.debug("Reference: interfering snap actions at %s", t)
            return None
        state = apply_effects(snaps, state)
    return state


def reference_valid(
    problem: GroundProblem, plan: TemporalPlan, semantics: InvariantSemantics | str = InvariantSemantics.RightClosed
) -> bool:
    """Decides plan validity directly from the reference semantics."""
    final = reference_run(problem, plan, semantics)
    return final is not None and models(final, problem.goal)
