import logging
import time

import pytest

from tempval.core import SUCCESS_MESSAGE, PlanValidator, check_plan, report_plan, verdict_of
from tempval.enums import HappeningPath, InvariantSemantics, ValidationErrorKind, Verdict
from tempval.exceptions import GroundingError, ParseError, ValidationError, WellFormednessError

from .conftest import FIXTURES, replace_step

SHIFTED_OP_E0 = "2.500000001: (op e0)[1]"


@pytest.fixture
def validator(domain_text, problem_text):
    return PlanValidator(domain_text, problem_text)


def test_check_golden_plan(domain_text, problem_text, plan_text):
    start = time.perf_counter()
    result = check_plan(domain_text, problem_text, plan_text)
    assert time.perf_counter() - start < 0.1
    assert result == SUCCESS_MESSAGE == "valid Plan"


@pytest.mark.parametrize("semantics", list(InvariantSemantics))
@pytest.mark.parametrize("path", list(HappeningPath))
def test_validate_on_every_path(domain_text, problem_text, plan_text, semantics, path):
    validator = PlanValidator(domain_text, problem_text, semantics=semantics, path=path)
    state = validator.validate(plan_text)
    assert {"(p-at p0 f0)", "(p-at p1 f1)"} <= {str(a) for a in state}


def test_domain_name_mismatch_warns_and_validates(domain_text, problem_text, plan_text, caplog):
    with caplog.at_level(logging.WARNING, logger="tempval"):
        result = check_plan(domain_text, problem_text, plan_text)
    assert result == SUCCESS_MESSAGE
    warnings = [r for r in caplog.records if r.levelno == logging.WARNING]
    assert [r.getMessage() for r in warnings] == [
        "Problem 'temp-elevators-prob1' names domain 'elevators', validating against 'temp-elevators'"
    ]


def test_from_files():
    validator = PlanValidator.from_files(FIXTURES / "domain.pddl", str(FIXTURES / "problem.pddl"), semantics="strict")
    assert validator.semantics == InvariantSemantics.Strict
    assert validator.check((FIXTURES / "plan.tplan").read_text()) == SUCCESS_MESSAGE


def test_repr(validator):
    assert repr(validator) == (
        "PlanValidator<(domain='temp-elevators', problem='temp-elevators-prob1', "
        "semantics='right-closed', path='auto')>"
    )


@pytest.mark.parametrize("steps, expected", [(1, HappeningPath.List), (64, HappeningPath.List), (65, HappeningPath.Balanced)])
def test_resolve_path(validator, steps, expected):
    assert validator.resolve_path(steps) == expected


def test_forced_path_is_kept(domain_text, problem_text):
    validator = PlanValidator(domain_text, problem_text, path="balanced")
    assert validator.resolve_path(1) == HappeningPath.Balanced


def test_happenings_of_prefix(validator, prefix_text):
    happenings = validator.happenings(prefix_text)
    assert len(happenings) == 13
    assert happenings[3].labels() == ["(en p1 e0 f0)_inv", "(op e1)_inv"]


def test_interference_then_epsilon_shift(validator, plan_text):
    clash = replace_step(plan_text, "3.5: (op e0)[1]", "2.5: (op e0)[1]")
    with pytest.raises(ValidationError) as e:
        validator.validate(clash)
    assert e.value.kind == ValidationErrorKind.Interference
    assert set(e.value.actions) == {"(cl e0)_end", "(op e0)_start"}
    assert validator.check(replace_step(plan_text, "3.5: (op e0)[1]", SHIFTED_OP_E0)) == SUCCESS_MESSAGE


def test_overlapping_close_is_valid(validator, plan_text):
    assert validator.check(replace_step(plan_text, "2: (cl e1)[1]", "1.25: (cl e1)[1]")) == SUCCESS_MESSAGE


def test_check_reports_first_error(validator, plan_text):
    result = validator.check(replace_step(plan_text, "2: (cl e1)[1]", "0.5: (cl e1)[1]"))
    assert result.startswith("error: at step 3: Precondition not satisfied")


def test_report_valid(validator, plan_text):
    report = validator.report(plan_text)
    assert report.ok
    assert report.verdict == Verdict.Valid
    assert report.message == SUCCESS_MESSAGE
    assert report.step_count == 11
    assert report.path == HappeningPath.List
    assert report.happening_count > report.step_count


@pytest.mark.parametrize(
    "old, new, verdict, message",
    [
        ("2: (cl e1)[1]", "1: (cl e1)[1]", Verdict.Invalid, "at step 5: Actions in happening interfering"),
        ("4.75: (ex p1 e0 f1)[0.5]", "4.75: (ex p1 e0 f1)[2]", Verdict.IllFormed, "duration"),
        ("2: (cl e1)[1]", "2: (fly e1)[1]", Verdict.IllFormed, "fly"),
        ("2: (cl e1)[1]", "2: (cl e1[1]", Verdict.ParseError, "plan:4:"),
    ],
)
def test_report_verdicts(domain_text, problem_text, plan_text, old, new, verdict, message):
    report = report_plan(domain_text, problem_text, replace_step(plan_text, old, new))
    assert report.verdict == verdict
    assert message in report.message
    assert not report.ok


def test_report_on_broken_domain(domain_text, problem_text, plan_text):
    report = report_plan(domain_text.replace("(:types", "(:typos"), problem_text, plan_text)
    assert report.verdict == Verdict.ParseError
    assert check_plan(domain_text, "(define", plan_text).startswith("error: ")


@pytest.mark.parametrize(
    "error, verdict",
    [
        (ParseError("plan", 1, 1, "a step", "x"), Verdict.ParseError),
        (WellFormednessError([]), Verdict.IllFormed),
        (GroundingError("boom"), Verdict.IllFormed),
        (ValidationError(ValidationErrorKind.Interference, 1), Verdict.Invalid),
    ],
)
def test_verdict_of(error, verdict):
    assert verdict_of(error) == verdict
