from fractions import Fraction

import pytest

from tempval.difftest import case_rng, generate_case
from tempval.enums import InvariantSemantics
from tempval.grounding import (
    TOP,
    Atom,
    GroundAtom,
    GroundDurativeAction,
    GroundProblem,
    Not,
    PlanEntry,
    SnapAction,
    TemporalPlan,
    ground_plan,
)
from tempval.parser import parse_plan
from tempval.semantics import (
    apply_effects,
    happening_time_points,
    invariants_at,
    models,
    non_interfering,
    reference_run,
    reference_valid,
    snap_set_at,
)

from .conftest import replace_step

P, Q, R = GroundAtom("p"), GroundAtom("q"), GroundAtom("r")
EL_OP_E0 = Atom(GroundAtom("el-op", ("e0",)))
EL_OP_E1 = Atom(GroundAtom("el-op", ("e1",)))

PREFIX_SNAPS = {
    Fraction(0): {"(op e1)_start"},
    Fraction(3, 4): {"(en p1 e0 f0)_start"},
    Fraction(1): {"(op e1)_end"},
    Fraction(5, 4): {"(en p1 e0 f0)_end", "(en p0 e1 f1)_start"},
    Fraction(3, 2): {"(cl e0)_start"},
}
PREFIX_INVARIANTS = {
    Fraction(0): set(),
    Fraction(3, 4): {TOP},
    Fraction(1): {TOP, EL_OP_E0},
    Fraction(5, 4): {EL_OP_E0},
    Fraction(3, 2): {EL_OP_E1},
}


def validity(domain, problem, plan_text, semantics):
    ground_problem, plan = ground_plan(domain, problem, parse_plan(plan_text))
    return reference_valid(ground_problem, plan, semantics)


def test_models():
    assert models({P}, Atom(P))
    assert models(set(), Not(Atom(P)))
    assert not models({Q}, Atom(P))


def test_happening_time_points_of_full_plan(grounded):
    _, plan = grounded
    htps = happening_time_points(plan)
    assert len(htps) == 16
    assert htps[:5] == [0, Fraction(3, 4), 1, Fraction(5, 4), Fraction(3, 2)]
    assert htps[-1] == Fraction(23, 4)
    assert htps == sorted(set(htps))


def test_happening_time_points_of_empty_plan():
    assert happening_time_points(TemporalPlan()) == []


@pytest.mark.parametrize("t", sorted(PREFIX_SNAPS))
def test_snap_set_at_prefix(grounded_prefix, t):
    _, plan = grounded_prefix
    assert {str(a) for a in snap_set_at(t, plan)} == PREFIX_SNAPS[t]


@pytest.mark.parametrize("t", sorted(PREFIX_INVARIANTS))
def test_invariants_at_prefix(grounded_prefix, t):
    _, plan = grounded_prefix
    assert invariants_at(t, plan) == PREFIX_INVARIANTS[t]
    assert invariants_at(t, plan, "right-closed") == PREFIX_INVARIANTS[t]


def test_invariants_at_strict_excludes_end_point(grounded_prefix):
    _, plan = grounded_prefix
    assert invariants_at(Fraction(1), plan, InvariantSemantics.Strict) == {EL_OP_E0}
    assert invariants_at(Fraction(5, 4), plan, InvariantSemantics.Strict) == set()
    assert invariants_at(Fraction(3, 2), plan, InvariantSemantics.Strict) == {EL_OP_E1}


def test_non_interfering():
    reads_p = SnapAction(Atom(P))
    adds_p = SnapAction(TOP, add=frozenset({P}))
    deletes_p = SnapAction(TOP, delete=frozenset({P}))
    adds_q = SnapAction(TOP, add=frozenset({Q}))
    assert not non_interfering(reads_p, adds_p)
    assert not non_interfering(deletes_p, reads_p)
    assert not non_interfering(adds_p, deletes_p)
    assert non_interfering(adds_p, adds_p)
    assert non_interfering(deletes_p, deletes_p)
    assert non_interfering(reads_p, adds_q)
    assert non_interfering(reads_p, reads_p)


def test_apply_effects_deletes_before_adding():
    a = SnapAction(TOP, add=frozenset({P}), delete=frozenset({P, Q}))
    b = SnapAction(TOP, add=frozenset({R}))
    assert apply_effects([a, b], {Q}) == {P, R}
    assert apply_effects([], {Q}) == {Q}


@pytest.mark.parametrize("semantics", list(InvariantSemantics))
def test_full_plan_is_valid(grounded, semantics):
    problem, plan = grounded
    assert reference_valid(problem, plan, semantics)
    final = reference_run(problem, plan, semantics)
    assert GroundAtom("p-at", ("p0", "f0")) in final
    assert GroundAtom("p-at", ("p1", "f1")) in final


def test_removing_door_reopening_depends_on_semantics(domain, problem, plan_text):
    mutated = replace_step(plan_text, "4: (op e1)[1]\n", "")
    assert not validity(domain, problem, mutated, InvariantSemantics.RightClosed)
    assert validity(domain, problem, mutated, InvariantSemantics.Strict)


@pytest.mark.parametrize(
    "old, new, expected",
    [
        ("2: (cl e1)[1]", "0.5: (cl e1)[1]", False),
        ("2: (cl e1)[1]", "1: (cl e1)[1]", False),
        ("3.5: (op e0)[1]", "2.5: (op e0)[1]", False),
        ("3.5: (op e0)[1]", "2.500000001: (op e0)[1]", True),
    ],
)
def test_mutated_plans(domain, problem, plan_text, old, new, expected):
    assert validity(domain, problem, replace_step(plan_text, old, new), InvariantSemantics.RightClosed) is expected


def test_empty_plan_checks_goal_in_initial_state():
    problem = GroundProblem(frozenset({P}), (), frozenset({P}), Atom(P))
    assert reference_run(problem, TemporalPlan()) == {P}
    assert reference_valid(problem, TemporalPlan())
    assert not reference_valid(GroundProblem(frozenset({P}), (), frozenset(), Atom(P)), TemporalPlan())


def test_zero_duration_action_joins_one_time_point():
    action = GroundDurativeAction(
        SnapAction(TOP, add=frozenset({P}), label="(a)_start"), SnapAction(TOP, add=frozenset({Q}), label="(a)_end"), label="(a)"
    )
    problem = GroundProblem(frozenset({P, Q}), (action,), frozenset(), Atom(Q))
    plan = TemporalPlan((PlanEntry(action, Fraction(1), Fraction(0)),))
    assert happening_time_points(plan) == [1]
    assert {str(a) for a in snap_set_at(Fraction(1), plan)} == {"(a)_start", "(a)_end"}
    assert reference_run(problem, plan) == {P, Q}


def test_invariant_violation_is_detected():
    action = GroundDurativeAction(SnapAction(TOP), SnapAction(TOP), Atom(P), label="(hold)")
    breaker = SnapAction(TOP, delete=frozenset({P}), label="(break)")
    problem = GroundProblem(frozenset({P}), (action, breaker), frozenset({P}), TOP)
    plan = TemporalPlan((PlanEntry(action, Fraction(0), Fraction(2)), PlanEntry(breaker, Fraction(1))))
    assert reference_run(problem, plan, InvariantSemantics.RightClosed) is None
    # strict checks no state inside (1, 2): the only later time point is the end itself
    assert reference_run(problem, plan, InvariantSemantics.Strict) == frozenset()


ATOMS = [GroundAtom(f"p{i}") for i in range(5)]


def random_snap(rng, pre=None):
    return SnapAction(
        Atom(rng.choice(ATOMS)) if pre is None else pre,
        frozenset(rng.sample(ATOMS, rng.randint(0, 2))),
        frozenset(rng.sample(ATOMS, rng.randint(0, 2))),
    )


def test_non_interfering_is_symmetric(rng):
    for _ in range(1000):
        a, b = random_snap(rng), random_snap(rng)
        assert non_interfering(a, b) == non_interfering(b, a)


def test_non_interfering_snaps_commute(rng):
    for _ in range(500):
        a, b = random_snap(rng, TOP), random_snap(rng, TOP)
        if a.add & a.delete or b.add & b.delete or not non_interfering(a, b):
            continue
        state = frozenset(rng.sample(ATOMS, rng.randint(0, 5)))
        joint = apply_effects([a, b], state)
        assert apply_effects([b], apply_effects([a], state)) == joint
        assert apply_effects([a], apply_effects([b], state)) == joint


def test_apply_effects_is_idempotent(rng):
    for _ in range(500):
        snaps = [random_snap(rng, TOP) for _ in range(rng.randint(0, 3))]
        state = frozenset(rng.sample(ATOMS, rng.randint(0, 5)))
        once = apply_effects(snaps, state)
        assert apply_effects(snaps, once) == once


def test_happening_time_points_match_brute_force():
    for index in range(300):
        plan = generate_case(case_rng(17, index), index=index).plan
        times = set()
        for entry in plan:
            times.add(entry.time)
            times.add(entry.time + (entry.duration or 0))
        assert happening_time_points(plan) == sorted(times)


@pytest.mark.parametrize("semantics", list(InvariantSemantics))
def test_reference_valid_ignores_entry_order(rng, semantics):
    for index in range(300):
        case = generate_case(case_rng(23, index), index=index)
        entries = list(case.plan.entries)
        rng.shuffle(entries)
        shuffled = TemporalPlan(tuple(entries))
        assert reference_valid(case.problem, shuffled, semantics) == reference_valid(case.problem, case.plan, semantics)
        assert reference_run(case.problem, shuffled, semantics) == reference_run(case.problem, case.plan, semantics)
