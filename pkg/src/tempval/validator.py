"""Executable plan checker.

A temporal plan is compiled into a happening sequence: start and end snap actions are placed at their time points,
and one precondition-only snap action per invariant is placed strictly inside every gap between consecutive
happening time points that the action spans. The sequence is then executed from the initial state.
"""

from __future__ import annotations

import logging
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, pairwise
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from ._avl import AVLTree
from .enums import InvariantSemantics, ValidationErrorKind
from .exceptions import ValidationError
from .grounding import GroundDurativeAction, GroundProblem, PlanEntry, SnapAction, TemporalPlan, invariant_as_snap
from .rational import render_rational
from .semantics import State, apply_effects, happening_time_points, non_interfering

__all__ = (
    "Happening",
    "HappeningSequence",
    "Placement",
    "check_goal",
    "format_happenings",
    "insert_action",
    "invariant_gaps",
    "is_induced",
    "midpoint",
    "simplify_action",
    "simplify_plan",
    "simplify_plan_balanced",
    "valid_hap_seq",
)

logger = logging.getLogger(__name__)

Placement = Callable[[Fraction, Fraction], Fraction]


@dataclass(frozen=True)
class Happening:
    """The snap actions executing at one time point.

    Snap actions compare structurally, so equal snap actions of different plan entries are one element of `acts`.
    `names` keeps every label merged into each element; it takes no part in equality.
    """

    time: Fraction
    acts: frozenset[SnapAction]
    names: Mapping[SnapAction, frozenset[str]] = field(default_factory=dict, compare=False, repr=False)

    def names_of(self, action: SnapAction) -> list[str]:
        return sorted(self.names.get(action) or (str(action),))

    def labels(self) -> list[str]:
        return sorted(name for a in self.acts for name in self.names_of(a))


HappeningSequence = tuple[Happening, ...]

_Acts = dict[SnapAction, set[str]]
_Slots = list[tuple[Fraction, _Acts]]


def midpoint(lo: Fraction, hi: Fraction) -> Fraction:
    return (lo + hi) / 2


def _add(acts: _Acts, action: SnapAction) -> None:
    acts.setdefault(action, set()).add(str(action))


def _insort(slots: _Slots, t: Fraction, action: SnapAction) -> None:
    for i, (r, acts) in enumerate(slots):
        if r == t:
            _add(acts, action)
            return
        if t < r:
            slots.insert(i, (t, {action: {str(action)}}))
            return
    slots.append((t, {action: {str(action)}}))


def _freeze(items: Iterable[tuple[Fraction, _Acts]]) -> HappeningSequence:
    return tuple(Happening(t, frozenset(acts), {a: frozenset(n) for a, n in acts.items()}) for t, acts in items)


def _thaw(happenings: Sequence[Happening]) -> _Slots:
    return [(h.time, {a: set(h.names_of(a)) for a in h.acts}) for h in happenings]


def insert_action(happenings: Sequence[Happening], t: Fraction, action: SnapAction) -> HappeningSequence:
    """Adds a snap action at time `t`, merging it into an existing happening at `t` if there is one.

    Args:
        happenings (Sequence[Happening]): A strictly sorted happening sequence.
        t (Fraction): Time of the snap action.
        action (SnapAction): The snap action.

    Returns:
        HappeningSequence: The extended sequence, still strictly sorted.
    """
    slots = _thaw(happenings)
    _insort(slots, t, action)
    return _freeze(slots)


def invariant_gaps(
    htps: Sequence[Fraction], start: Fraction, end: Fraction, semantics: InvariantSemantics | str = InvariantSemantics.RightClosed
) -> Iterator[tuple[Fraction, Fraction]]:
    """Consecutive happening time point pairs over which an action running from `start` to `end` checks its invariant.

    Under right-closed semantics these are all gaps inside [start, end]; under strict semantics the gap ending at
    `end` is left out.
    """
    first = bisect_left(htps, start)
    if InvariantSemantics(semantics) == InvariantSemantics.RightClosed:
        last = bisect_right(htps, end) - 1
    else:
        last = bisect_left(htps, end) - 1
    for i in range(first, last):
        yield htps[i], htps[i + 1]


def _ranks(htps: Sequence[Fraction]) -> dict[Fraction, int]:
    return {t: i for i, t in enumerate(htps)}


def _right_closed(semantics: InvariantSemantics | str) -> bool:
    return InvariantSemantics(semantics) == InvariantSemantics.RightClosed


def _snap_insertions(
    htps: Sequence[Fraction], ranks: Mapping[Fraction, int], entry: PlanEntry, right_closed: bool, placement: Placement
) -> Iterator[tuple[int, Fraction, SnapAction]]:
    # order key: 2i for the time point htps[i], 2i + 1 for the gap (htps[i], htps[i + 1])
    action = entry.action
    start = ranks[entry.time]
    if not isinstance(action, GroundDurativeAction):
        yield 2 * start, htps[start], action
        return
    end = ranks[entry.end]
    yield 2 * start, htps[start], action.start
    invariant = invariant_as_snap(action)
    for i in range(start, end if right_closed else end - 1):
        lo, hi = htps[i], htps[i + 1]
        point = placement(lo, hi)
        if not lo < point < hi:
            raise ValueError(f"Invariant placement {point} is not strictly between {lo} and {hi}")
        yield 2 * i + 1, point, invariant
    yield 2 * end, htps[end], action.end


def simplify_action(
    htps: Sequence[Fraction],
    entry: PlanEntry,
    happenings: Sequence[Happening],
    semantics: InvariantSemantics | str = InvariantSemantics.RightClosed,
    placement: Placement = midpoint,
) -> HappeningSequence:
    """Inserts the snap actions of one plan entry into a happening sequence.

    Args:
        htps (Sequence[Fraction]): Happening time points of the whole plan.
        entry (PlanEntry): The plan entry.
        happenings (Sequence[Happening]): The sequence built so far.
        semantics (InvariantSemantics | str): Invariant interval. Defaults to right-closed.
        placement (Placement): Picks a point strictly inside a gap for each invariant check. Defaults to the midpoint.

    Returns:
        HappeningSequence: The sequence with the entry's start, end and invariant snap actions inserted.
    """
    slots = _thaw(happenings)
    for _, t, snap in _snap_insertions(htps, _ranks(htps), entry, _right_closed(semantics), placement):
        _insort(slots, t, snap)
    return _freeze(slots)


def simplify_plan(
    plan: TemporalPlan, semantics: InvariantSemantics | str = InvariantSemantics.RightClosed, placement: Placement = midpoint
) -> HappeningSequence:
    """Builds the happening sequence induced by a plan by sorted insertion into a list.

    Args:
        plan (TemporalPlan): The plan.
        semantics (InvariantSemantics | str): Invariant interval. Defaults to right-closed.
        placement (Placement): Picks a point strictly inside a gap for each invariant check. Defaults to the midpoint.

    Returns:
        HappeningSequence: The induced happening sequence.
    """
    htps = happening_time_points(plan)
    ranks = _ranks(htps)
    right_closed = _right_closed(semantics)
    slots: _Slots = []
    for entry in plan:
        for _, t, snap in _snap_insertions(htps, ranks, entry, right_closed, placement):
            _insort(slots, t, snap)
    return _freeze(slots)


def simplify_plan_balanced(
    plan: TemporalPlan, semantics: InvariantSemantics | str = InvariantSemantics.RightClosed, placement: Placement = midpoint
) -> HappeningSequence:
    """Same as `simplify_plan`, keeping the happenings in a balanced search tree.

    The tree is keyed by the position of each time among the happening time points and the gaps between them, so
    most comparisons are between small integers rather than between rationals.
    """
    htps = happening_time_points(plan)
    ranks = _ranks(htps)
    right_closed = _right_closed(semantics)
    tree: AVLTree[tuple[int, Fraction], _Acts] = AVLTree()
    for entry in plan:
        for order, t, snap in _snap_insertions(htps, ranks, entry, right_closed, placement):
            _add(tree.setdefault((order, t), dict), snap)
    return _freeze((t, acts) for (_, t), acts in tree.items())


def is_induced(
    plan: TemporalPlan, happenings: Sequence[Happening], semantics: InvariantSemantics | str = InvariantSemantics.RightClosed
) -> bool:
    """Checks whether a happening sequence is one induced by the plan.

    Every start, end and simple snap action must sit at its own time point, every gap an action spans must contain
    a happening checking its invariant, happenings must be nonempty and strictly sorted, and every snap action in
    the sequence must be justified by some plan entry.
    """
    if any(not h.acts for h in happenings) or any(a.time >= b.time for a, b in pairwise(happenings)):
        return False
    at = {h.time: h.acts for h in happenings}
    htps = happening_time_points(plan)
    exact: set[tuple[Fraction, SnapAction]] = set()
    windows: list[tuple[SnapAction, Fraction, Fraction]] = []

    for entry in plan:
        action = entry.action
        if not isinstance(action, GroundDurativeAction):
            exact.add((entry.time, action))
            continue
        exact.add((entry.time, action.start))
        exact.add((entry.end, action.end))
        invariant = invariant_as_snap(action)
        for lo, hi in invariant_gaps(htps, entry.time, entry.end, semantics):
            windows.append((invariant, lo, hi))

    if any(snap not in at.get(t, ()) for t, snap in exact):
        return False
    for invariant, lo, hi in windows:
        if not any(lo < h.time < hi and invariant in h.acts for h in happenings):
            return False
    for h in happenings:
        for snap in h.acts:
            if (h.time, snap) not in exact and not any(snap == s and lo < h.time < hi for s, lo, hi in windows):
                return False
    return True


def _joined(happening: Happening, action: SnapAction) -> str:
    return " / ".join(happening.names_of(action))


def valid_hap_seq(happenings: Sequence[Happening], problem: GroundProblem) -> State:
    """Executes a happening sequence from the problem's initial state.

    Each happening must be pairwise non-interfering and have every precondition satisfied before its effects
    apply. The goal is not checked.

    Args:
        happenings (Sequence[Happening]): The happening sequence.
        problem (GroundProblem): The ground problem.

    Returns:
        State: The state after the last happening.
    """
    state = problem.init
    for step, happening in enumerate(happenings, start=1):
        acts = sorted(happening.acts, key=str)
        for a, b in combinations(acts, 2):
            if not non_interfering(a, b):
                culprits = happening.names_of(a) + happening.names_of(b)
                detail = f"{_joined(happening, a)} and {_joined(happening, b)}"
                raise ValidationError(ValidationErrorKind.Interference, step, happening.time, culprits, detail)
        for a in acts:
            if not a.pre.sat(state):
                detail = f"{_joined(happening, a)} needs {a.pre}"
                raise ValidationError(ValidationErrorKind.PreconditionUnsatisfied, step, happening.time, happening.names_of(a), detail)
        state = apply_effects(acts, state)
    return state


def check_goal(state: State, problem: GroundProblem) -> None:
    if not problem.goal.sat(state):
        raise ValidationError(ValidationErrorKind.GoalUnsatisfied, detail=str(problem.goal))


def format_happenings(happenings: Sequence[Happening]) -> str:
    """One `<time>: {<snap actions>}` line per happening."""
    return "".join(f"{render_rational(h.time)}: {{{', '.join(h.labels())}}}\n" for h in happenings)
