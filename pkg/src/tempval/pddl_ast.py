"""Abstract syntax of PDDL 2.1 temporal domains, problems and plans.

Names are stored lowercase. Variables keep their leading `?`. Every node may carry the source position it was
read from, so that later stages can point back into the input.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing_extensions import Self

from .enums import DurationComparison, Requirement, TimeSpecifier

__all__ = (
    "OBJECT_TYPE",
    "ActionSchemaAst",
    "AndFormula",
    "AtomFormula",
    "DomainAst",
    "DurationConstraint",
    "EitherType",
    "EqualsFormula",
    "FormulaAst",
    "FunctionAssignment",
    "FunctionTerm",
    "ImplyFormula",
    "NotFormula",
    "OrFormula",
    "PlanAst",
    "PlanStep",
    "PredicateDecl",
    "ProblemAst",
    "SourcePos",
    "TimedCondition",
    "TimedEffect",
    "TypeDecl",
    "TypedName",
    "is_variable",
)

OBJECT_TYPE = "object"


def is_variable(term: str) -> bool:
    return term.startswith("?")


class _Node(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class SourcePos(_Node):
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class EitherType(_Node):
    """A union of primitive types; a single primitive type is a one-element union."""

    names: tuple[str, ...]

    @field_validator("names")
    @classmethod
    def _check_names(cls, names: tuple[str, ...]) -> tuple[str, ...]:
        if not names:
            raise ValueError("an either type needs at least one primitive type")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate primitive types in (either {' '.join(names)})")
        return names

    @classmethod
    def of(cls, *names: str) -> Self:
        return cls(names=tuple(names))

    def __str__(self) -> str:
        return self.names[0] if len(self.names) == 1 else f"(either {' '.join(self.names)})"


class TypedName(_Node):
    name: str
    type: EitherType = EitherType.of(OBJECT_TYPE)
    pos: Optional[SourcePos] = None


class TypeDecl(_Node):
    name: str
    parent: EitherType = EitherType.of(OBJECT_TYPE)
    pos: Optional[SourcePos] = None


class PredicateDecl(_Node):
    name: str
    parameters: tuple[TypedName, ...] = ()
    pos: Optional[SourcePos] = None


class AtomFormula(_Node):
    predicate: str
    args: tuple[str, ...] = ()
    pos: Optional[SourcePos] = None


class EqualsFormula(_Node):
    left: str
    right: str
    pos: Optional[SourcePos] = None


class NotFormula(_Node):
    arg: FormulaAst
    pos: Optional[SourcePos] = None


class AndFormula(_Node):
    args: tuple[FormulaAst, ...] = ()
    pos: Optional[SourcePos] = None


class OrFormula(_Node):
    args: tuple[FormulaAst, ...] = ()
    pos: Optional[SourcePos] = None


class ImplyFormula(_Node):
    antecedent: FormulaAst
    consequent: FormulaAst
    pos: Optional[SourcePos] = None


FormulaAst = Union[AtomFormula, EqualsFormula, NotFormula, AndFormula, OrFormula, ImplyFormula]


class TimedCondition(_Node):
    """A condition; `spec` is None for the precondition of a simple action."""

    spec: Optional[TimeSpecifier]
    formula: FormulaAst
    pos: Optional[SourcePos] = None


class TimedEffect(_Node):
    """A single effect literal; `spec` is None for the effects of a simple action."""

    spec: Optional[TimeSpecifier]
    atom: AtomFormula
    negated: bool = False
    pos: Optional[SourcePos] = None

    @field_validator("spec")
    @classmethod
    def _check_spec(cls, spec: Optional[TimeSpecifier]) -> Optional[TimeSpecifier]:
        if spec == TimeSpecifier.OverAll:
            raise ValueError("effects can only be annotated with 'at start' or 'at end'")
        return spec


class FunctionTerm(_Node):
    name: str
    args: tuple[str, ...] = ()
    pos: Optional[SourcePos] = None

    def __str__(self) -> str:
        return f"({' '.join((self.name, *self.args))})"


class DurationConstraint(_Node):
    """`(<comparison> ?duration <value>)` where the value is a number or a function lookup."""

    comparison: DurationComparison
    value: Union[Fraction, FunctionTerm]
    pos: Optional[SourcePos] = None


class ActionSchemaAst(_Node):
    """A `:durative-action` or a plain `:action` schema.

    For durative schemata, `duration` is the conjunction of its duration constraints (empty for `(and)`); for
    simple schemata it is None and every condition and effect has no time specifier.
    """

    name: str
    parameters: tuple[TypedName, ...] = ()
    durative: bool = True
    duration: Optional[tuple[DurationConstraint, ...]] = None
    conditions: tuple[TimedCondition, ...] = ()
    effects: tuple[TimedEffect, ...] = ()
    pos: Optional[SourcePos] = None

    @model_validator(mode="after")
    def _check_annotations(self) -> Self:
        if self.durative:
            if self.duration is None:
                raise ValueError(f"durative action '{self.name}' needs a duration constraint")
            annotated = [c.spec for c in self.conditions] + [e.spec for e in self.effects]
            if any(spec is None for spec in annotated):
                raise ValueError(f"durative action '{self.name}' has an unannotated condition or effect")
        else:
            if self.duration is not None:
                raise ValueError(f"simple action '{self.name}' cannot have a duration")
            annotated = [c.spec for c in self.conditions] + [e.spec for e in self.effects]
            if any(spec is not None for spec in annotated):
                raise ValueError(f"simple action '{self.name}' cannot have temporal annotations")
        return self


class DomainAst(_Node):
    name: str
    requirements: tuple[Requirement, ...] = ()
    types: tuple[TypeDecl, ...] = ()
    constants: tuple[TypedName, ...] = ()
    predicates: tuple[PredicateDecl, ...] = ()
    functions: tuple[PredicateDecl, ...] = ()
    schemata: tuple[ActionSchemaAst, ...] = ()
    pos: Optional[SourcePos] = None

    def get_schema(self, name: str) -> Optional[ActionSchemaAst]:
        return next((s for s in self.schemata if s.name == name), None)


class FunctionAssignment(_Node):
    term: FunctionTerm
    value: Fraction
    pos: Optional[SourcePos] = None


class ProblemAst(_Node):
    name: str
    domain_name: str
    objects: tuple[TypedName, ...] = ()
    init: tuple[AtomFormula, ...] = ()
    assignments: tuple[FunctionAssignment, ...] = ()
    goal: FormulaAst = Field(default_factory=AndFormula)
    pos: Optional[SourcePos] = None

    @model_validator(mode="after")
    def _check_assignments(self) -> Self:
        seen: dict[tuple[str, tuple[str, ...]], Fraction] = {}
        for assignment in self.assignments:
            key = (assignment.term.name, assignment.term.args)
            if seen.setdefault(key, assignment.value) != assignment.value:
                raise ValueError(f"function term {assignment.term} is assigned more than one value")
        return self


class PlanStep(_Node):
    time: Fraction
    name: str
    args: tuple[str, ...] = ()
    duration: Optional[Fraction] = None
    line: int = 0

    @model_validator(mode="after")
    def _check_non_negative(self) -> Self:
        if self.time < 0 or (self.duration is not None and self.duration < 0):
            raise ValueError("plan times and durations must be non-negative")
        return self


class PlanAst(_Node):
    steps: tuple[PlanStep, ...] = ()


for _model in (NotFormula, AndFormula, OrFormula, ImplyFormula, TimedCondition, ActionSchemaAst, DomainAst, ProblemAst):
    _model.model_rebuild()
