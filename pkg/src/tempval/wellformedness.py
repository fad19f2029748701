from __future__ import annotations

import logging
import operator
from collections import Counter
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from pydantic import BaseModel, ConfigDict

from .enums import DurationComparison, Requirement, WfErrorCategory
from .exceptions import WellFormednessError
from .pddl_ast import (
    OBJECT_TYPE,
    ActionSchemaAst,
    AndFormula,
    AtomFormula,
    DomainAst,
    EitherType,
    EqualsFormula,
    FormulaAst,
    FunctionTerm,
    ImplyFormula,
    NotFormula,
    OrFormula,
    PlanAst,
    PlanStep,
    PredicateDecl,
    ProblemAst,
    SourcePos,
    TypeDecl,
    TypedName,
    is_variable,
)
from .rational import render_rational

__all__ = (
    "FunctionTable",
    "SubtypeGraph",
    "WfError",
    "check_domain",
    "check_duration",
    "check_plan_steps",
    "check_problem",
    "ensure_well_formed",
    "function_table",
    "object_types",
    "of_type",
)

logger = logging.getLogger(__name__)

FunctionTable = Mapping[tuple[str, tuple[str, ...]], Fraction]

_COMPARISONS = {DurationComparison.Eq: operator.eq, DurationComparison.Leq: operator.le, DurationComparison.Geq: operator.ge}


class WfError(BaseModel):
    model_config = ConfigDict(frozen=True)

    category: WfErrorCategory
    name: str
    context: str
    pos: Optional[SourcePos] = None

    def __str__(self) -> str:
        where = f" at {self.pos}" if self.pos else ""
        return f"{self.category.value} '{self.name}'{where}: {self.context}"


class SubtypeGraph:
    """Reflexive-transitive closure of the declared supertype edges, rooted at `object`.

    Args:
        edges (Mapping[str, Iterable[str]]): Map from each declared type to its direct supertypes.
    """

    def __init__(self, edges: Mapping[str, Iterable[str]]) -> None:
        self._edges = {name: tuple(parents) for name, parents in edges.items()}
        self._edges.setdefault(OBJECT_TYPE, ())
        self._closure: dict[str, frozenset[str]] = {}

    @classmethod
    def from_domain(cls, domain: DomainAst) -> SubtypeGraph:
        edges: dict[str, list[str]] = {}
        for decl in domain.types:
            edges.setdefault(decl.name, []).extend(p for p in decl.parent.names if p != decl.name)
        return cls(edges)

    @property
    def declared(self) -> frozenset[str]:
        return frozenset(self._edges)

    def ancestors(self, name: str) -> frozenset[str]:
        """All types `name` is a subtype of, itself included."""
        if name not in self._closure:
            seen = {name}
            stack = [name]
            while stack:
                for parent in self._edges.get(stack.pop(), ()):
                    if parent not in seen:
                        seen.add(parent)
                        stack.append(parent)
            self._closure[name] = frozenset(seen)
        return self._closure[name]

    def is_subtype(self, sub: str, sup: str) -> bool:
        return sup in self.ancestors(sub)

    def undeclared(self, either: EitherType) -> list[str]:
        return [n for n in either.names if n not in self._edges]

    def __repr__(self) -> str:
        return f"SubtypeGraph(types={sorted(self._edges)})"


def of_type(arg: EitherType, param: EitherType, graph: SubtypeGraph) -> bool:
    """Checks whether an argument of type `arg` may be substituted for a parameter of type `param`.

    Every primitive type of `arg` must be a subtype of at least one primitive type of `param`.

    Args:
        arg (EitherType): Type of the argument.
        param (EitherType): Type of the parameter.
        graph (SubtypeGraph): The domain's subtype relation.

    Returns:
        bool: Whether the substitution is well-typed.
    """
    unknown = graph.undeclared(arg) + graph.undeclared(param)
    if unknown:
        raise WellFormednessError(
            [WfError(category=WfErrorCategory.UndeclaredName, name=n, context="type is not declared") for n in unknown]
        )
    return all(any(graph.is_subtype(a, p) for p in param.names) for a in arg.names)


def object_types(domain: DomainAst, problem: Optional[ProblemAst] = None) -> dict[str, EitherType]:
    """Map from every constant and problem object to its declared type."""
    objects = list(domain.constants) + (list(problem.objects) if problem else [])
    return {o.name: o.type for o in objects}


def function_table(problem: ProblemAst) -> dict[tuple[str, tuple[str, ...]], Fraction]:
    return {(a.term.name, a.term.args): a.value for a in problem.assignments}


def _duplicates(named: Iterable[TypeDecl | TypedName | PredicateDecl | ActionSchemaAst], what: str) -> Iterator[WfError]:
    items = list(named)
    counts = Counter(i.name for i in items)
    reported: set[str] = set()
    for item in items:
        if counts[item.name] > 1 and item.name not in reported:
            reported.add(item.name)
            yield WfError(category=WfErrorCategory.DuplicateDefinition, name=item.name, context=f"{what} defined twice", pos=item.pos)


class _Checker:
    """Accumulates well-formedness errors over one domain and, optionally, one problem."""

    def __init__(self, domain: DomainAst, problem: Optional[ProblemAst] = None) -> None:
        self.domain = domain
        self.problem = problem
        self.graph = SubtypeGraph.from_domain(domain)
        self.predicates = {p.name: p for p in domain.predicates}
        self.functions = {f.name: f for f in domain.functions}
        self.objects = object_types(domain, problem)
        self.requirements = set(domain.requirements)
        self.errors: list[WfError] = []

    def add(self, category: WfErrorCategory, name: str, context: str, pos: Optional[SourcePos] = None) -> None:
        self.errors.append(WfError(category=category, name=name, context=context, pos=pos))

    def require(self, requirement: Requirement, name: str, pos: Optional[SourcePos]) -> None:
        if requirement not in self.requirements:
            self.add(WfErrorCategory.MissingRequirement, name, f"needs {requirement.value}", pos)

    def check_type(self, either: EitherType, pos: Optional[SourcePos]) -> bool:
        unknown = self.graph.undeclared(either)
        for name in unknown:
            self.add(WfErrorCategory.UndeclaredName, name, "type is not declared", pos)
        return not unknown

    def check_typed(self, names: Sequence[TypedName]) -> None:
        for typed in names:
            self.check_type(typed.type, typed.pos)

    def check_args(
        self,
        kind: str,
        name: str,
        params: Sequence[TypedName],
        args: Sequence[str],
        scope: Mapping[str, EitherType],
        pos: Optional[SourcePos],
    ) -> None:
        if len(params) != len(args):
            self.add(WfErrorCategory.ArityMismatch, name, f"{kind} takes {len(params)} arguments, got {len(args)}", pos)
            return
        for param, arg in zip(params, args):
            arg_type = scope.get(arg)
            if arg_type is None:
                what = "variable is not a parameter" if is_variable(arg) else "object is not declared"
                self.add(WfErrorCategory.UndeclaredName, arg, what, pos)
            elif self.graph.undeclared(arg_type) or self.graph.undeclared(param.type):
                continue
            elif not of_type(arg_type, param.type, self.graph):
                self.add(WfErrorCategory.TypeMismatch, arg, f"{arg_type} where {param.type} expected in {name}", pos)

    def check_atom(self, atom: AtomFormula, scope: Mapping[str, EitherType]) -> None:
        decl = self.predicates.get(atom.predicate)
        if decl is None:
            self.add(WfErrorCategory.UndeclaredName, atom.predicate, "predicate is not declared", atom.pos)
            return
        self.check_args("predicate", atom.predicate, decl.parameters, atom.args, scope, atom.pos)

    def check_formula(self, formula: FormulaAst, scope: Mapping[str, EitherType], gated: bool = True) -> None:
        if isinstance(formula, AtomFormula):
            self.check_atom(formula, scope)
        elif isinstance(formula, EqualsFormula):
            if gated:
                self.require(Requirement.Equality, "=", formula.pos)
            for term in (formula.left, formula.right):
                if term not in scope:
                    self.add(WfErrorCategory.UndeclaredName, term, "term is not declared", formula.pos)
        elif isinstance(formula, NotFormula):
            if gated:
                self.require(Requirement.NegativePreconditions, "not", formula.pos)
            self.check_formula(formula.arg, scope, gated)
        elif isinstance(formula, AndFormula):
            for arg in formula.args:
                self.check_formula(arg, scope, gated)
        elif isinstance(formula, OrFormula):
            if gated:
                self.require(Requirement.DisjunctivePreconditions, "or", formula.pos)
            for arg in formula.args:
                self.check_formula(arg, scope, gated)
        elif isinstance(formula, ImplyFormula):
            if gated:
                self.require(Requirement.DisjunctivePreconditions, "imply", formula.pos)
            self.check_formula(formula.antecedent, scope, gated)
            self.check_formula(formula.consequent, scope, gated)

    def check_function_term(self, term: FunctionTerm, scope: Mapping[str, EitherType]) -> None:
        decl = self.functions.get(term.name)
        if decl is None:
            self.add(WfErrorCategory.UndeclaredName, term.name, "function is not declared", term.pos)
            return
        self.check_args("function", term.name, decl.parameters, term.args, scope, term.pos)

    def check_schema(self, schema: ActionSchemaAst) -> None:
        self.check_typed(schema.parameters)
        self.errors.extend(_duplicates(schema.parameters, f"parameter of '{schema.name}'"))
        scope = {**object_types(self.domain), **{p.name: p.type for p in schema.parameters}}
        if schema.durative:
            self.require(Requirement.DurativeActions, schema.name, schema.pos)
        for constraint in schema.duration or ():
            if constraint.comparison != DurationComparison.Eq:
                self.require(Requirement.DurationInequalities, schema.name, constraint.pos)
            if isinstance(constraint.value, FunctionTerm):
                self.check_function_term(constraint.value, scope)
        for condition in schema.conditions:
            self.check_formula(condition.formula, scope)
        for effect in schema.effects:
            self.check_atom(effect.atom, scope)

    def check_domain(self) -> None:
        domain = self.domain
        self.errors.extend(_duplicates(domain.types, "type"))
        self.errors.extend(_duplicates(domain.constants, "constant"))
        self.errors.extend(_duplicates(domain.predicates, "predicate"))
        self.errors.extend(_duplicates(domain.functions, "function"))
        self.errors.extend(_duplicates(domain.schemata, "action"))
        if domain.types:
            self.require(Requirement.Typing, domain.name, domain.pos)
        for decl in domain.types:
            if self.check_type(decl.parent, decl.pos) and not self.graph.is_subtype(decl.name, OBJECT_TYPE):
                self.add(WfErrorCategory.TypeMismatch, decl.name, "type does not reach object", decl.pos)
        self.check_typed(domain.constants)
        for decl in (*domain.predicates, *domain.functions):
            self.check_typed(decl.parameters)
        for schema in domain.schemata:
            self.check_schema(schema)

    def check_problem(self) -> None:
        problem = self.problem
        assert problem is not None
        if problem.domain_name != self.domain.name:
            logger.warning("Problem '%s' names domain '%s', validating against '%s'", problem.name, problem.domain_name, self.domain.name)
        self.check_typed(problem.objects)
        self.errors.extend(_duplicates([*self.domain.constants, *problem.objects], "object"))
        for atom in problem.init:
            self.check_atom(atom, self.objects)
        for assignment in problem.assignments:
            self.check_function_term(assignment.term, self.objects)
        self.check_formula(problem.goal, self.objects)

    def check_step(self, step: PlanStep, functions: FunctionTable) -> None:
        pos = SourcePos(line=step.line, column=1) if step.line else None
        schema = self.domain.get_schema(step.name)
        if schema is None:
            self.add(WfErrorCategory.UndeclaredName, step.name, "action is not declared", pos)
            return
        errors_before = len(self.errors)
        self.check_args("action", step.name, schema.parameters, step.args, self.objects, pos)
        if len(self.errors) > errors_before:
            return
        if schema.durative and step.duration is None:
            self.add(WfErrorCategory.DurationViolation, step.name, "durative action needs a duration", pos)
        elif not schema.durative and step.duration is not None:
            self.add(WfErrorCategory.DurationViolation, step.name, "simple action cannot have a duration", pos)
        elif step.duration is not None:
            error = check_duration(schema, step.args, step.duration, functions)
            if error is not None:
                self.errors.append(error.model_copy(update={"pos": pos}))


def check_domain(domain: DomainAst) -> list[WfError]:
    """Checks declarations, typing and requirement gating of a domain.

    Args:
        domain (DomainAst): The parsed domain.

    Returns:
        list[WfError]: Every error found; empty when the domain is well-formed.
    """
    checker = _Checker(domain)
    checker.check_domain()
    return checker.errors


def check_problem(domain: DomainAst, problem: ProblemAst) -> list[WfError]:
    """Checks that a problem uses the domain's predicates, functions and types correctly.

    Args:
        domain (DomainAst): The parsed domain.
        problem (ProblemAst): The parsed problem.

    Returns:
        list[WfError]: Every error found; empty when the problem is well-formed.
    """
    checker = _Checker(domain, problem)
    checker.check_problem()
    return checker.errors


def check_plan_steps(domain: DomainAst, problem: ProblemAst, plan: PlanAst) -> list[WfError]:
    """Checks that every plan step names a declared action with well-typed arguments and an admissible duration."""
    checker = _Checker(domain, problem)
    functions = function_table(problem)
    for step in plan.steps:
        checker.check_step(step, functions)
    return checker.errors


def check_duration(schema: ActionSchemaAst, args: Sequence[str], duration: Fraction, functions: FunctionTable) -> Optional[WfError]:
    """Evaluates the duration constraints of a schema for one plan step.

    Args:
        schema (ActionSchemaAst): The durative action schema.
        args (Sequence[str]): Objects bound to the schema's parameters.
        duration (Fraction): Duration given in the plan.
        functions (FunctionTable): Function values of the problem's initial state.

    Returns:
        Optional[WfError]: None if every constraint holds, else the first violation.
    """
    binding = dict(zip((p.name for p in schema.parameters), args))
    for constraint in schema.duration or ():
        if isinstance(constraint.value, FunctionTerm):
            ground = tuple(binding.get(a, a) for a in constraint.value.args)
            bound = functions.get((constraint.value.name, ground))
            if bound is None:
                term = f"({' '.join((constraint.value.name, *ground))})"
                return WfError(category=WfErrorCategory.UndefinedFunctionValue, name=term, context="function term has no value")
        else:
            bound = constraint.value
        comparison = constraint.comparison
        if not _COMPARISONS[comparison](duration, bound):
            return WfError(
                category=WfErrorCategory.DurationViolation,
                name=schema.name,
                context=f"duration {render_rational(duration)} violates (?duration {comparison.value} {render_rational(bound)})",
            )
    return None


def ensure_well_formed(domain: DomainAst, problem: ProblemAst, plan: Optional[PlanAst] = None) -> None:
    """Raises WellFormednessError with every error of the domain, problem and, if given, plan."""
    errors = check_domain(domain) + check_problem(domain, problem)
    if plan is not None:
        errors += check_plan_steps(domain, problem, plan)
    if errors:
        raise WellFormednessError(errors)
