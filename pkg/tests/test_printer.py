from fractions import Fraction

import pytest

from tempval.parser import parse_domain, parse_plan, parse_problem
from tempval.pddl_ast import AtomFormula, PlanAst, PlanStep
from tempval.printer import render_domain, render_formula, render_plan, render_plan_step, render_problem


def test_render_domain_is_canonical(domain_text, domain):
    assert render_domain(domain) == domain_text


def test_render_problem_is_canonical(problem_text, problem):
    assert render_problem(problem) == problem_text


def test_render_domain_reparses():
    text = """
    (define (domain d)
      (:requirements :strips :typing :equality)
      (:types a - object b - a)
      (:constants k - b)
      (:predicates (p ?x - a) (q))
      (:action go :parameters (?x - a ?y - b) :precondition (and (p ?x) (not (= ?x ?y))) :effect (and (q) (not (p ?x)))))
    """
    once = render_domain(parse_domain(text))
    assert render_domain(parse_domain(once)) == once
    assert ":precondition (and (p ?x) (not (= ?x ?y)))" in once
    assert "(:types a - object b - a)" in once


def test_render_formula():
    assert render_formula(AtomFormula(predicate="el-op", args=("e0",))) == "(el-op e0)"


@pytest.mark.parametrize(
    "step, expected",
    [
        (PlanStep(time=Fraction(0), name="op", args=("e1",), duration=Fraction(1)), "0: (op e1)[1]"),
        (PlanStep(time=Fraction(5, 4), name="en", args=("p0", "e1", "f1"), duration=Fraction(1, 2)), "1.25: (en p0 e1 f1)[0.5]"),
        (PlanStep(time=Fraction(1, 3), name="go"), "1/3: (go)"),
    ],
)
def test_render_plan_step(step, expected):
    assert render_plan_step(step) == expected


def test_render_plan_reparses(plan_text):
    plan = parse_plan(plan_text)
    rendered = render_plan(plan)
    assert rendered.count("\n") == len(plan.steps)
    reparsed = parse_plan(rendered)
    assert [(s.time, s.name, s.args, s.duration) for s in reparsed.steps] == [
        (s.time, s.name, s.args, s.duration) for s in plan.steps
    ]


def test_render_empty_plan():
    assert render_plan(PlanAst()) == ""


def test_render_problem_reparses(problem):
    assert render_problem(parse_problem(render_problem(problem))) == render_problem(problem)
