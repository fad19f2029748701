"""Canonical PDDL rendering of the ASTs; parsing the output yields the same AST again."""

from __future__ import annotations

from fractions import Fraction
from itertools import groupby
from typing import Sequence

from .enums import TimeSpecifier
from .pddl_ast import (
    ActionSchemaAst,
    AndFormula,
    AtomFormula,
    DomainAst,
    DurationConstraint,
    EqualsFormula,
    FormulaAst,
    ImplyFormula,
    NotFormula,
    OrFormula,
    PlanAst,
    PlanStep,
    PredicateDecl,
    ProblemAst,
    TimedEffect,
    TypedName,
)
from .rational import render_rational

__all__ = ("render_domain", "render_formula", "render_plan", "render_plan_step", "render_problem")

_INDENT = "  "


def _typed(names: Sequence[TypedName]) -> str:
    groups = groupby(names, key=lambda n: n.type)
    return " ".join(f"{' '.join(n.name for n in group)} - {type_}" for type_, group in groups)


def _sexpr(*parts: str) -> str:
    return "(" + " ".join(p for p in parts if p) + ")"


def render_formula(formula: FormulaAst) -> str:
    if isinstance(formula, AtomFormula):
        return _sexpr(formula.predicate, *formula.args)
    if isinstance(formula, EqualsFormula):
        return _sexpr("=", formula.left, formula.right)
    if isinstance(formula, NotFormula):
        return _sexpr("not", render_formula(formula.arg))
    if isinstance(formula, AndFormula):
        return _sexpr("and", *map(render_formula, formula.args))
    if isinstance(formula, OrFormula):
        return _sexpr("or", *map(render_formula, formula.args))
    if isinstance(formula, ImplyFormula):
        return _sexpr("imply", render_formula(formula.antecedent), render_formula(formula.consequent))
    raise TypeError(f"Unsupported formula node {type(formula).__name__}")


def _conjunction(parts: list[str]) -> str:
    return parts[0] if len(parts) == 1 else _sexpr("and", *parts)


def _effect(effect: TimedEffect) -> str:
    literal = render_formula(effect.atom)
    return _sexpr("not", literal) if effect.negated else literal


def _timed(spec: TimeSpecifier | None, body: str) -> str:
    return body if spec is None else _sexpr(spec.value, body)


def _duration(constraints: tuple[DurationConstraint, ...]) -> str:
    parts = []
    for c in constraints:
        value = render_rational(c.value) if isinstance(c.value, Fraction) else str(c.value)
        parts.append(_sexpr(c.comparison.value, "?duration", value))
    return _sexpr("and") if not parts else _conjunction(parts)


def _schema(schema: ActionSchemaAst) -> list[str]:
    lines = [f"{_INDENT}(:{'durative-action' if schema.durative else 'action'} {schema.name}"]
    lines.append(f"{_INDENT * 3}:parameters ({_typed(schema.parameters)})")
    if schema.duration is not None:
        lines.append(f"{_INDENT * 3}:duration {_duration(schema.duration)}")
    conditions = [_timed(c.spec, render_formula(c.formula)) for c in schema.conditions]
    effects = [_timed(e.spec, _effect(e)) for e in schema.effects]
    keyword = ":condition" if schema.durative else ":precondition"
    if conditions:
        lines.append(f"{_INDENT * 3}{keyword} {_conjunction(conditions)}")
    if effects:
        lines.append(f"{_INDENT * 3}:effect {_conjunction(effects)}")
    lines[-1] += ")"
    return lines


def _declarations(decls: Sequence[PredicateDecl]) -> str:
    return " ".join(_sexpr(d.name, _typed(d.parameters)) for d in decls)


def render_domain(domain: DomainAst) -> str:
    """Renders a domain as PDDL text.

    Args:
        domain (DomainAst): The domain to render.

    Returns:
        str: PDDL source that parses back to an equivalent domain.
    """
    lines = [f"(define (domain {domain.name})"]
    if domain.requirements:
        lines.append(f"{_INDENT}(:requirements {' '.join(r.value for r in domain.requirements)})")
    if domain.types:
        groups = [(parent, " ".join(t.name for t in g)) for parent, g in groupby(domain.types, key=lambda t: t.parent)]
        lines.append(f"{_INDENT}(:types {' '.join(f'{names} - {parent}' for parent, names in groups)})")
    if domain.constants:
        lines.append(f"{_INDENT}(:constants {_typed(domain.constants)})")
    if domain.predicates:
        lines.append(f"{_INDENT}(:predicates {_declarations(domain.predicates)})")
    if domain.functions:
        lines.append(f"{_INDENT}(:functions {_declarations(domain.functions)} - number)")
    for schema in domain.schemata:
        lines.extend(_schema(schema))
    lines[-1] += ")"
    return "\n".join(lines) + "\n"


def render_problem(problem: ProblemAst) -> str:
    """Renders a problem as PDDL text, initial atoms before function assignments."""
    facts = [render_formula(a) for a in problem.init]
    facts += [_sexpr("=", str(a.term), render_rational(a.value)) for a in problem.assignments]
    lines = [
        f"(define (problem {problem.name})",
        f"{_INDENT}(:domain {problem.domain_name})",
        f"{_INDENT}(:objects {_typed(problem.objects)})",
        f"{_INDENT}(:init {' '.join(facts)})",
        f"{_INDENT}(:goal {render_formula(problem.goal)}))",
    ]
    return "\n".join(lines) + "\n"


def render_plan_step(step: PlanStep) -> str:
    line = f"{render_rational(step.time)}: {_sexpr(step.name, *step.args)}"
    if step.duration is not None:
        line += f"[{render_rational(step.duration)}]"
    return line


def render_plan(plan: PlanAst) -> str:
    return "".join(render_plan_step(s) + "\n" for s in plan.steps)
