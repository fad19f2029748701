from __future__ import annotations

import logging
import time
from pathlib import Path
from typing import Any, Optional

from typing_extensions import Self

from .enums import HappeningPath, InvariantSemantics, Verdict
from .exceptions import GroundingError, ParseError, TempvalError, ValidationError, WellFormednessError
from .grounding import GroundProblem, TemporalPlan, ground_plan
from .models import RunReport
from .parser import parse_domain, parse_plan, parse_problem
from .pddl_ast import DomainAst, PlanAst, ProblemAst
from .semantics import State
from .validator import HappeningSequence, check_goal, simplify_plan, simplify_plan_balanced, valid_hap_seq
from .wellformedness import check_domain, check_plan_steps, check_problem

__all__ = ("SUCCESS_MESSAGE", "PlanValidator", "check_plan", "report_plan", "verdict_of")

logger = logging.getLogger(__name__)

SUCCESS_MESSAGE = "valid Plan"


def verdict_of(error: TempvalError) -> Verdict:
    """Maps an error raised while validating to the verdict it stands for."""
    if isinstance(error, ParseError):
        return Verdict.ParseError
    if isinstance(error, (WellFormednessError, GroundingError)):
        return Verdict.IllFormed
    if isinstance(error, ValidationError):
        return Verdict.Invalid
    raise ValueError(f"No verdict for {type(error).__name__}")


class PlanValidator:
    """Validates timed plans against one PDDL domain and problem.

    The domain and problem are parsed and checked for well-formedness once; every plan is then parsed, checked,
    grounded, compiled into its induced happening sequence and executed.

    Args:
        domain (DomainAst | str): The domain, parsed or as PDDL text.
        problem (ProblemAst | str): The problem, parsed or as PDDL text.
        semantics (Optional[InvariantSemantics | str]): Interval over which invariants are checked. Defaults to None
            for right-closed.
        path (Optional[HappeningPath | str]): How the happening sequence is built. Defaults to None for automatic
            choice: a balanced tree for plans with more than 64 steps, a sorted list otherwise.
    """

    _DEFAULT_SEMANTICS = InvariantSemantics.RightClosed
    _DEFAULT_PATH = HappeningPath.Auto
    _BALANCED_THRESHOLD = 64

    def __init__(
        self,
        domain: DomainAst | str,
        problem: ProblemAst | str,
        semantics: Optional[InvariantSemantics | str] = None,
        path: Optional[HappeningPath | str] = None,
    ) -> None:
        self.domain = parse_domain(domain) if isinstance(domain, str) else domain
        self.problem = parse_problem(problem) if isinstance(problem, str) else problem
        self.semantics = InvariantSemantics(semantics or self._DEFAULT_SEMANTICS)
        self.path = HappeningPath(path or self._DEFAULT_PATH)
        errors = check_domain(self.domain) + check_problem(self.domain, self.problem)
        if errors:
            raise WellFormednessError(errors)

    @classmethod
    def from_files(cls, domain_path: str | Path, problem_path: str | Path, **kwargs: Any) -> Self:
        """Creates a validator from a domain file and a problem file.

        Args:
            domain_path (str | Path): Path of the PDDL domain file.
            problem_path (str | Path): Path of the PDDL problem file.
            **kwargs (Any): Keyword arguments of `PlanValidator`.

        Returns:
            PlanValidator: A validator for the problem.
        """
        domain = Path(domain_path).read_text(encoding="utf-8")
        problem = Path(problem_path).read_text(encoding="utf-8")
        return cls(domain, problem, **kwargs)

    def resolve_path(self, step_count: int) -> HappeningPath:
        if self.path != HappeningPath.Auto:
            return self.path
        return HappeningPath.Balanced if step_count > self._BALANCED_THRESHOLD else HappeningPath.List

    def ground(self, plan: PlanAst | str) -> tuple[GroundProblem, TemporalPlan]:
        """Parses, checks and grounds a plan.

        Args:
            plan (PlanAst | str): The plan, parsed or as text.

        Returns:
            tuple[GroundProblem, TemporalPlan]: The ground problem and the ground plan.
        """
        plan = parse_plan(plan) if isinstance(plan, str) else plan
        errors = check_plan_steps(self.domain, self.problem, plan)
        if errors:
            raise WellFormednessError(errors)
        return ground_plan(self.domain, self.problem, plan)

    def happenings(self, plan: PlanAst | str | TemporalPlan) -> HappeningSequence:
        """Builds the happening sequence induced by a plan.

        Args:
            plan (PlanAst | str | TemporalPlan): The plan, parsed, as text or already ground.

        Returns:
            HappeningSequence: The induced happening sequence.
        """
        ground = plan if isinstance(plan, TemporalPlan) else self.ground(plan)[1]
        path = self.resolve_path(len(ground))
        logger.debug("Building happening sequence of %d steps on the %s path", len(ground), path.value)
        if path == HappeningPath.Balanced:
            return simplify_plan_balanced(ground, self.semantics)
        return simplify_plan(ground, self.semantics)

    def validate(self, plan: PlanAst | str) -> State:
        """Validates a plan, raising the first error found.

        Args:
            plan (PlanAst | str): The plan, parsed or as text.

        Returns:
            State: The final state, which satisfies the goal.
        """
        problem, ground = self.ground(plan)
        state = valid_hap_seq(self.happenings(ground), problem)
        check_goal(state, problem)
        return state

    def check(self, plan: PlanAst | str) -> str:
        """Returns "valid Plan" for a valid plan, else "error: " followed by the diagnostic."""
        try:
            self.validate(plan)
        except TempvalError as e:
            return f"error: {e}"
        return SUCCESS_MESSAGE

    def report(self, plan: PlanAst | str) -> RunReport:
        """Validates a plan and reports the verdict, timing and sizes."""
        start = time.perf_counter()
        happening_count = step_count = 0
        path = None
        try:
            problem, ground = self.ground(plan)
            step_count = len(ground)
            path = self.resolve_path(step_count)
            happenings = self.happenings(ground)
            happening_count = len(happenings)
            check_goal(valid_hap_seq(happenings, problem), problem)
        except TempvalError as e:
            verdict, message = verdict_of(e), str(e)
        else:
            verdict, message = Verdict.Valid, SUCCESS_MESSAGE
        return RunReport(
            verdict=verdict,
            message=message,
            duration_seconds=time.perf_counter() - start,
            happening_count=happening_count,
            step_count=step_count,
            path=path,
        )

    def __repr__(self) -> str:
        return (
            f"PlanValidator<(domain='{self.domain.name}', problem='{self.problem.name}', "
            f"semantics='{self.semantics.value}', path='{self.path.value}')>"
        )


def report_plan(
    domain: str,
    problem: str,
    plan: str,
    semantics: Optional[InvariantSemantics | str] = None,
    path: Optional[HappeningPath | str] = None,
) -> RunReport:
    """Validates a plan given as texts end to end, reporting errors of every stage as a verdict.

    Args:
        domain (str): PDDL domain text.
        problem (str): PDDL problem text.
        plan (str): Plan text.
        semantics (Optional[InvariantSemantics | str]): Interval over which invariants are checked. Defaults to None
            for right-closed.
        path (Optional[HappeningPath | str]): How the happening sequence is built. Defaults to None for automatic.

    Returns:
        RunReport: The outcome.
    """
    start = time.perf_counter()
    try:
        validator = PlanValidator(domain, problem, semantics=semantics, path=path)
    except TempvalError as e:
        return RunReport(verdict=verdict_of(e), message=str(e), duration_seconds=time.perf_counter() - start)
    report = validator.report(plan)
    return report.model_copy(update={"duration_seconds": time.perf_counter() - start})


def check_plan(
    domain: str,
    problem: str,
    plan: str,
    semantics: Optional[InvariantSemantics | str] = None,
    path: Optional[HappeningPath | str] = None,
) -> str:
    """Validates a plan given as texts; returns "valid Plan" or "error: " followed by the first diagnostic."""
    report = report_plan(domain, problem, plan, semantics=semantics, path=path)
    return SUCCESS_MESSAGE if report.ok else f"error: {report.message}"
