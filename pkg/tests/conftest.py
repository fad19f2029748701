import random
from pathlib import Path

import pytest

from tempval.grounding import ground_plan
from tempval.parser import parse_domain, parse_plan, parse_problem

FIXTURES = Path(__file__).parent / "fixtures" / "elevator"


def read_fixture(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def replace_step(plan_text: str, old: str, new: str) -> str:
    assert old in plan_text
    return plan_text.replace(old, new)


@pytest.fixture
def domain_text() -> str:
    return read_fixture("domain.pddl")


@pytest.fixture
def problem_text() -> str:
    return read_fixture("problem.pddl")


@pytest.fixture
def plan_text() -> str:
    return read_fixture("plan.tplan")


@pytest.fixture
def prefix_text() -> str:
    return read_fixture("prefix.tplan")


@pytest.fixture
def domain(domain_text):
    return parse_domain(domain_text)


@pytest.fixture
def problem(problem_text):
    return parse_problem(problem_text)


@pytest.fixture
def grounded(domain, problem, plan_text):
    return ground_plan(domain, problem, parse_plan(plan_text))


@pytest.fixture
def grounded_prefix(domain, problem, prefix_text):
    return ground_plan(domain, problem, parse_plan(prefix_text))


@pytest.fixture
def rng(request) -> random.Random:
    seed = request.param if hasattr(request, "param") and request.param is not None else 0
    return random.Random(seed)
