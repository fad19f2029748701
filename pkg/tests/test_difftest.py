from fractions import Fraction

import pytest

from tempval.difftest import (
    SCALE_FACTOR,
    case_rng,
    check_scale_invariance,
    compare,
    describe_case,
    difftest,
    generate_case,
    minimize,
    random_placement,
    scale_plan,
)
from tempval.enums import InvariantSemantics, Mutation
from tempval.grounding import GroundDurativeAction
from tempval.models import SizeBounds
from tempval.mutants import run_pipeline, run_reference
from tempval.validator import is_induced, simplify_plan, valid_hap_seq

SEMANTICS = list(InvariantSemantics)
MUTATION_CASES = 3000


def cases(seed, count, bounds=None):
    return [generate_case(case_rng(seed, i), bounds, i) for i in range(count)]


def first_disagreement(mutation, semantics=InvariantSemantics.RightClosed):
    for case in cases(11, MUTATION_CASES):
        if compare(case, semantics, mutation) is not None:
            return case
    return None


def test_generation_is_reproducible():
    assert generate_case(case_rng(5, 3)) == generate_case(case_rng(5, 3))
    assert case_rng(5, 3).random() != case_rng(5, 4).random()


def test_generated_cases_respect_bounds():
    bounds = SizeBounds(max_atoms=3, max_actions=2, max_steps=4, max_denominator=2, max_time=2)
    for case in cases(1, 300, bounds):
        assert len(case.problem.atoms) <= 3
        assert len(case.problem.actions) <= 2
        assert len(case.plan) <= 4
        for entry in case.plan:
            assert entry.time.denominator <= 2 and entry.time <= 2
            if entry.duration is not None:
                assert entry.duration.denominator <= 2 and entry.duration <= 2


def test_generator_covers_both_action_kinds():
    actions = [a for case in cases(2, 200) for a in case.problem.actions]
    assert any(isinstance(a, GroundDurativeAction) for a in actions)
    assert any(not isinstance(a, GroundDurativeAction) for a in actions)


def test_empty_run():
    report = difftest(0, 0)
    assert report.ok
    assert report.count == 0
    assert report.disagreements == []


@pytest.mark.parametrize("count, workers", [(-1, 1), (10, 0)])
def test_bad_arguments(count, workers):
    with pytest.raises(ValueError):
        difftest(0, count, workers=workers)


@pytest.mark.parametrize("semantics", SEMANTICS)
@pytest.mark.parametrize("seed", [0, 42])
def test_no_disagreements(seed, semantics):
    report = difftest(seed, 1000, semantics=semantics)
    assert report.disagreements == []
    assert report.semantics == semantics
    assert report.mutation is None


@pytest.mark.slow
@pytest.mark.parametrize("semantics", SEMANTICS)
def test_no_disagreements_large(semantics):
    report = difftest(7, 10_000, semantics=semantics, workers=4)
    assert report.ok
    assert report.duration_seconds < 60


def test_reference_and_pipeline_agree_on_final_states():
    for case in cases(3, 500):
        assert run_reference(case.problem, case.plan) == run_pipeline(case.problem, case.plan)


@pytest.mark.parametrize("mutation", list(Mutation))
def test_every_mutation_is_caught(mutation):
    assert first_disagreement(mutation) is not None


def test_mutation_report_carries_reproducer():
    report = difftest(11, MUTATION_CASES, mutation="unsorted-happenings")
    assert report.mutation == Mutation.UnsortedHappenings
    assert not report.ok
    disagreement = report.disagreements[0]
    assert disagreement.reference_valid != disagreement.pipeline_valid or (
        disagreement.reference_state != disagreement.pipeline_state
    )
    assert "plan:" in disagreement.reproducer


def test_workers_do_not_change_results():
    single = difftest(4, 300, mutation=Mutation.DeleteAfterAdd)
    pooled = difftest(4, 300, mutation=Mutation.DeleteAfterAdd, workers=2)
    assert pooled.disagreements == single.disagreements


def test_minimize_keeps_failure():
    mutation = Mutation.SkippedInterference
    case = first_disagreement(mutation)

    def fails(c):
        return compare(c, InvariantSemantics.RightClosed, mutation) is not None

    small = minimize(case, fails)
    assert fails(small)
    assert len(small.plan) <= len(case.plan)
    assert small.problem.init <= case.problem.init
    assert set(small.plan.entries) <= set(case.plan.entries)


def test_describe_case():
    case = cases(9, 1)[0]
    text = describe_case(case)
    lines = text.splitlines()
    assert lines[0].startswith("atoms: p0")
    assert lines[1].startswith("init:")
    assert lines[2] == f"goal: {case.problem.goal}"
    assert "actions:" in lines and "plan:" in lines
    assert len(lines) - lines.index("plan:") - 1 == len(case.plan)


@pytest.mark.parametrize("semantics", SEMANTICS)
def test_induced_sequences(semantics):
    for case in cases(21, 1000):
        assert is_induced(case.plan, simplify_plan(case.plan, semantics), semantics)


@pytest.mark.parametrize("rng", [13], indirect=True)
def test_random_placement_gives_same_final_state(rng):
    checked = 0
    for case in cases(13, 3000):
        expected = run_reference(case.problem, case.plan)
        if expected is None or not case.problem.goal.sat(expected):
            continue
        happenings = simplify_plan(case.plan, placement=random_placement(rng))
        assert valid_hap_seq(happenings, case.problem) == expected
        checked += 1
        if checked == 1000:
            break
    assert checked > 0


def test_random_placement_stays_inside_gap(rng):
    place = random_placement(rng)
    for _ in range(100):
        assert Fraction(1) < place(Fraction(1), Fraction(9, 8)) < Fraction(9, 8)


def test_scale_plan():
    case = next(c for c in cases(8, 50) if len(c.plan))
    scaled = scale_plan(case.plan)
    for before, after in zip(case.plan, scaled):
        assert after.time == before.time * SCALE_FACTOR
        assert after.action == before.action
    with pytest.raises(ValueError):
        scale_plan(case.plan, Fraction(0))


@pytest.mark.parametrize("semantics", SEMANTICS)
def test_verdict_is_scale_invariant(semantics):
    assert all(check_scale_invariance(case, semantics) for case in cases(17, 500))
