"""Ground formulas, snap actions and the instantiation of action schemata.

A ground durative action is a triple of a start snap action, an end snap action and an invariant formula. Simple
actions ground to a single snap action. Equality between objects is decided while instantiating, so every ground
formula is purely propositional.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

from .enums import TimeSpecifier
from .exceptions import GroundingError
from .pddl_ast import (
    ActionSchemaAst,
    AndFormula,
    AtomFormula,
    DomainAst,
    EqualsFormula,
    FormulaAst,
    ImplyFormula,
    NotFormula,
    OrFormula,
    PlanAst,
    ProblemAst,
)
from .wellformedness import SubtypeGraph, object_types, of_type

__all__ = (
    "FALSE",
    "TOP",
    "And",
    "Atom",
    "Formula",
    "GroundAction",
    "GroundAtom",
    "GroundDurativeAction",
    "GroundProblem",
    "Not",
    "Or",
    "PlanEntry",
    "SnapAction",
    "TemporalPlan",
    "Top",
    "atoms",
    "conjoin",
    "disjoin",
    "enumerate_ground_actions",
    "ground_plan",
    "instantiate",
    "invariant_as_snap",
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True, slots=True)
class GroundAtom:
    predicate: str
    args: tuple[str, ...] = ()

    def __str__(self) -> str:
        return f"({' '.join((self.predicate, *self.args))})"


class Formula:
    """A propositional formula over ground atoms."""

    __slots__ = ()

    def sat(self, state: frozenset[GroundAtom]) -> bool:
        raise NotImplementedError

    def atoms(self) -> frozenset[GroundAtom]:
        raise NotImplementedError


@dataclass(frozen=True, slots=True)
class Top(Formula):
    def sat(self, state: frozenset[GroundAtom]) -> bool:
        return True

    def atoms(self) -> frozenset[GroundAtom]:
        return frozenset()

    def __str__(self) -> str:
        return "(and)"


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    atom: GroundAtom

    def sat(self, state: frozenset[GroundAtom]) -> bool:
        return self.atom in state

    def atoms(self) -> frozenset[GroundAtom]:
        return frozenset((self.atom,))

    def __str__(self) -> str:
        return str(self.atom)


@dataclass(frozen=True, slots=True)
class Not(Formula):
    arg: Formula

    def sat(self, state: frozenset[GroundAtom]) -> bool:
        return not self.arg.sat(state)

    def atoms(self) -> frozenset[GroundAtom]:
        return self.arg.atoms()

    def __str__(self) -> str:
        return f"(not {self.arg})"


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula

    def sat(self, state: frozenset[GroundAtom]) -> bool:
        return self.left.sat(state) and self.right.sat(state)

    def atoms(self) -> frozenset[GroundAtom]:
        return self.left.atoms() | self.right.atoms()

    def __str__(self) -> str:
        return f"(and {self.left} {self.right})"


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula

    def sat(self, state: frozenset[GroundAtom]) -> bool:
        return self.left.sat(state) or self.right.sat(state)

    def atoms(self) -> frozenset[GroundAtom]:
        return self.left.atoms() | self.right.atoms()

    def __str__(self) -> str:
        return f"(or {self.left} {self.right})"


TOP = Top()
FALSE = Not(TOP)


def atoms(formula: Formula) -> frozenset[GroundAtom]:
    return formula.atoms()


def conjoin(formulas: Iterable[Formula]) -> Formula:
    """Left-nested conjunction of `formulas`, dropping verum conjuncts; verum when nothing is left."""
    parts = [f for f in formulas if f != TOP]
    return reduce(And, parts) if parts else TOP


def disjoin(formulas: Iterable[Formula]) -> Formula:
    parts = list(formulas)
    return reduce(Or, parts) if parts else FALSE


@dataclass(frozen=True, slots=True)
class SnapAction:
    """An instantaneous action: a precondition plus add and delete sets.

    Equality and hashing are structural; `label` only names the action in diagnostics.
    """

    pre: Formula
    add: frozenset[GroundAtom] = frozenset()
    delete: frozenset[GroundAtom] = frozenset()
    label: str = field(default="", compare=False)
    pre_atoms: frozenset[GroundAtom] = field(init=False, compare=False, repr=False)
    _hash: int = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "pre_atoms", self.pre.atoms())
        object.__setattr__(self, "_hash", hash((self.pre, self.add, self.delete)))

    def __hash__(self) -> int:
        return self._hash

    def __reduce__(self) -> tuple[type[SnapAction], tuple[Formula, frozenset[GroundAtom], frozenset[GroundAtom], str]]:
        # string hashes differ between interpreters, so the cached hash is rebuilt on unpickling
        return SnapAction, (self.pre, self.add, self.delete, self.label)

    def atoms(self) -> frozenset[GroundAtom]:
        return self.pre_atoms | self.add | self.delete

    def __str__(self) -> str:
        return self.label or f"<{self.pre}, +{sorted(map(str, self.add))}, -{sorted(map(str, self.delete))}>"


@dataclass(frozen=True, slots=True)
class GroundDurativeAction:
    start: SnapAction
    end: SnapAction
    inv: Formula = TOP
    label: str = field(default="", compare=False)

    def atoms(self) -> frozenset[GroundAtom]:
        return self.start.atoms() | self.end.atoms() | self.inv.atoms()

    def __str__(self) -> str:
        return self.label or f"<{self.start}, {self.end}, {self.inv}>"


GroundAction = Union[GroundDurativeAction, SnapAction]


def invariant_as_snap(action: GroundDurativeAction) -> SnapAction:
    """The precondition-only snap action that checks the invariant of `action`."""
    return SnapAction(action.inv, label=f"{action.label}_inv" if action.label else "")


@dataclass(frozen=True, slots=True)
class PlanEntry:
    """One plan step: a ground action, its start time and, for durative actions, its duration."""

    action: GroundAction
    time: Fraction
    duration: Optional[Fraction] = None

    def __post_init__(self) -> None:
        if self.time < 0 or (self.duration is not None and self.duration < 0):
            raise ValueError(f"Plan entry {self.action} has a negative time or duration")
        if isinstance(self.action, GroundDurativeAction) != (self.duration is not None):
            raise ValueError(f"Plan entry {self.action} needs a duration if and only if it is durative")

    @property
    def durative(self) -> bool:
        return isinstance(self.action, GroundDurativeAction)

    @property
    def end(self) -> Fraction:
        return self.time + (self.duration or 0)


@dataclass(frozen=True)
class TemporalPlan:
    entries: tuple[PlanEntry, ...] = ()

    def __iter__(self) -> Iterator[PlanEntry]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class GroundProblem:
    """A ground planning problem: atom universe, actions, initial state and goal."""

    atoms: frozenset[GroundAtom]
    actions: tuple[GroundAction, ...]
    init: frozenset[GroundAtom]
    goal: Formula

    def __post_init__(self) -> None:
        outside = (self.init | self.goal.atoms()).union(*(a.atoms() for a in self.actions)) - self.atoms
        if outside:
            raise ValueError(f"Atoms outside the problem's atom set: {sorted(map(str, outside))}")


def _ground_formula(formula: FormulaAst, binding: Mapping[str, str]) -> Formula:
    if isinstance(formula, AtomFormula):
        return Atom(GroundAtom(formula.predicate, tuple(binding.get(a, a) for a in formula.args)))
    if isinstance(formula, EqualsFormula):
        return TOP if binding.get(formula.left, formula.left) == binding.get(formula.right, formula.right) else FALSE
    if isinstance(formula, NotFormula):
        return Not(_ground_formula(formula.arg, binding))
    if isinstance(formula, AndFormula):
        return conjoin(_ground_formula(a, binding) for a in formula.args)
    if isinstance(formula, OrFormula):
        return disjoin(_ground_formula(a, binding) for a in formula.args)
    if isinstance(formula, ImplyFormula):
        return Or(Not(_ground_formula(formula.antecedent, binding)), _ground_formula(formula.consequent, binding))
    raise TypeError(f"Unsupported formula node {type(formula).__name__}")


def _snap(
    schema: ActionSchemaAst, binding: Mapping[str, str], spec: Optional[TimeSpecifier], label: str
) -> SnapAction:
    pre = conjoin(_ground_formula(c.formula, binding) for c in schema.conditions if c.spec == spec)
    add: set[GroundAtom] = set()
    delete: set[GroundAtom] = set()
    for effect in schema.effects:
        if effect.spec == spec:
            atom = GroundAtom(effect.atom.predicate, tuple(binding.get(a, a) for a in effect.atom.args))
            (delete if effect.negated else add).add(atom)
    if add & delete:
        clash = ", ".join(sorted(map(str, add & delete)))
        raise GroundingError(f"{label} both adds and deletes {clash}")
    return SnapAction(pre, frozenset(add), frozenset(delete), label)


def instantiate(schema: ActionSchemaAst, args: Sequence[str]) -> GroundAction:
    """Grounds a schema with the given objects.

    At-start conditions and effects form the start snap action, at-end ones the end snap action and over-all
    conditions the invariant. A simple action grounds to one snap action.

    Args:
        schema (ActionSchemaAst): The action schema.
        args (Sequence[str]): Objects for the schema's parameters, in order.

    Returns:
        GroundAction: The ground durative action or snap action.
    """
    if len(args) != len(schema.parameters):
        raise GroundingError(f"Action '{schema.name}' takes {len(schema.parameters)} arguments, got {len(args)}")
    binding = {p.name: a for p, a in zip(schema.parameters, args)}
    label = f"({' '.join((schema.name, *args))})"
    if not schema.durative:
        return _snap(schema, binding, None, label)
    return GroundDurativeAction(
        start=_snap(schema, binding, TimeSpecifier.AtStart, f"{label}_start"),
        end=_snap(schema, binding, TimeSpecifier.AtEnd, f"{label}_end"),
        inv=conjoin(_ground_formula(c.formula, binding) for c in schema.conditions if c.spec == TimeSpecifier.OverAll),
        label=label,
    )


def enumerate_ground_actions(domain: DomainAst, problem: ProblemAst) -> list[GroundAction]:
    """Instantiates every schema over every type-correct tuple of objects."""
    graph = SubtypeGraph.from_domain(domain)
    objects = object_types(domain, problem)
    result: list[GroundAction] = []
    for schema in domain.schemata:
        candidates = [[o for o, t in objects.items() if of_type(t, p.type, graph)] for p in schema.parameters]
        result.extend(instantiate(schema, args) for args in itertools.product(*candidates))
    return result


def ground_plan(domain: DomainAst, problem: ProblemAst, plan: PlanAst) -> tuple[GroundProblem, TemporalPlan]:
    """Grounds the actions a plan uses together with the problem's initial state and goal.

    The atom set of the result holds every atom of the initial state, the goal and the plan's actions.

    Args:
        domain (DomainAst): A well-formed domain.
        problem (ProblemAst): A well-formed problem of that domain.
        plan (PlanAst): A well-formed plan.

    Returns:
        tuple[GroundProblem, TemporalPlan]: The ground problem and the plan over its actions.
    """
    cache: dict[tuple[str, tuple[str, ...]], GroundAction] = {}
    entries = []
    for step in plan.steps:
        key = (step.name, step.args)
        if key not in cache:
            schema = domain.get_schema(step.name)
            if schema is None:
                raise GroundingError(f"Action '{step.name}' is not declared")
            cache[key] = instantiate(schema, step.args)
        entries.append(PlanEntry(cache[key], step.time, step.duration))

    init = frozenset(GroundAtom(a.predicate, a.args) for a in problem.init)
    goal = _ground_formula(problem.goal, {})
    actions = tuple(cache.values())
    universe = (init | goal.atoms()).union(*(a.atoms() for a in actions))
    logger.debug("Grounded %d plan steps into %d actions over %d atoms", len(entries), len(actions), len(universe))
    return GroundProblem(universe, actions, init, goal), TemporalPlan(tuple(entries))
