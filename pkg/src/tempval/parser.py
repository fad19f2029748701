from __future__ import annotations

import logging
from fractions import Fraction
from typing import Any, Callable, Iterator, Optional, Sequence, TypeVar

import pydantic
from pyparsing import (
    Group,
    Optional as Opt,
    ParseBaseException,
    ParserElement,
    Regex,
    Suppress,
    ZeroOrMore,
)

from ._sexpr import SExpr, SList, Symbol, read_sexprs
from .enums import DurationComparison, FileRole, Requirement, TimeSpecifier, ValidationErrorKind
from .exceptions import ParseError, UnsupportedRequirement, ValidationError
from .pddl_ast import (
    ActionSchemaAst,
    AndFormula,
    AtomFormula,
    DomainAst,
    DurationConstraint,
    EitherType,
    EqualsFormula,
    FormulaAst,
    FunctionAssignment,
    FunctionTerm,
    ImplyFormula,
    NotFormula,
    OrFormula,
    PlanAst,
    PlanStep,
    PredicateDecl,
    ProblemAst,
    SourcePos,
    TimedCondition,
    TimedEffect,
    TypeDecl,
    TypedName,
    is_variable,
)
from .rational import DECIMAL_PATTERN, rational_from_decimal

__all__ = ("parse_domain", "parse_plan", "parse_problem")

logger = logging.getLogger(__name__)

_T = TypeVar("_T")

_UNSUPPORTED_FORMULAS = {"forall", "exists", "when"}
_NUMERIC_EFFECTS = {"increase", "decrease", "assign", "scale-up", "scale-down"}
_ARITHMETIC = {"+", "-", "*", "/"}


class _Reader:
    """Shared helpers for turning s-expressions of one input file into AST nodes."""

    def __init__(self, role: FileRole) -> None:
        self.role = role

    def error(self, node: Optional[SExpr], expected: str, found: Optional[str] = None) -> ParseError:
        if node is None:
            return ParseError(self.role, 1, 1, expected, found or "end of input")
        return ParseError(self.role, node.line, node.column, expected, found if found is not None else repr(str(node)))

    @staticmethod
    def pos(node: SExpr) -> SourcePos:
        return SourcePos(line=node.line, column=node.column)

    def build(self, node: SExpr, factory: Callable[..., _T], **fields: object) -> _T:
        try:
            return factory(**fields)
        except pydantic.ValidationError as e:
            raise self.error(node, e.errors()[0]["msg"].removeprefix("Value error, ")) from None

    def symbol(self, node: Optional[SExpr], expected: str) -> Symbol:
        if not isinstance(node, Symbol):
            raise self.error(node, expected)
        return node

    def slist(self, node: Optional[SExpr], expected: str, head: Optional[str] = None) -> SList:
        if not isinstance(node, SList) or (head is not None and node.head() != head):
            raise self.error(node, expected)
        return node

    def name(self, node: Optional[SExpr], expected: str = "a name") -> str:
        symbol = self.symbol(node, expected)
        if is_variable(symbol.text) or symbol.text.startswith(":") or symbol.text == "-":
            raise self.error(symbol, expected)
        return symbol.text

    def term(self, node: SExpr) -> str:
        return self.symbol(node, "a variable or object name").text

    def either_type(self, node: Optional[SExpr]) -> EitherType:
        if isinstance(node, SList):
            if node.head() != "either" or len(node) < 2:
                raise self.error(node, "a type name or (either ...)")
            return self.build(node, EitherType, names=tuple(self.name(n, "a type name") for n in node.items[1:]))
        return EitherType.of(self.name(node, "a type name"))

    def typed_list(self, items: Sequence[SExpr], variables: bool) -> list[TypedName]:
        """Reads `a b - t c - (either u v) d`, untyped trailing names being of type object."""
        result: list[TypedName] = []
        pending: list[Symbol] = []
        i = 0
        while i < len(items):
            node = items[i]
            if isinstance(node, Symbol) and node.text == "-":
                if not pending or i + 1 >= len(items):
                    raise self.error(node, "names before and a type after '-'")
                type_ = self.either_type(items[i + 1])
                result.extend(TypedName(name=s.text, type=type_, pos=self.pos(s)) for s in pending)
                pending = []
                i += 2
                continue
            symbol = self.symbol(node, "a variable" if variables else "a name")
            if is_variable(symbol.text) != variables or symbol.text.startswith(":"):
                raise self.error(symbol, "a variable" if variables else "a name")
            pending.append(symbol)
            i += 1
        result.extend(TypedName(name=s.text, pos=self.pos(s)) for s in pending)
        return result

    def atom(self, node: SList) -> AtomFormula:
        predicate = self.name(node.items[0] if node.items else None, "a predicate name")
        return AtomFormula(predicate=predicate, args=tuple(self.term(n) for n in node.items[1:]), pos=self.pos(node))

    def formula(self, node: SExpr) -> FormulaAst:
        node = self.slist(node, "a formula")
        head = node.head()
        args = node.items[1:]
        if head == "and":
            return AndFormula(args=tuple(self.formula(a) for a in args), pos=self.pos(node))
        if head == "or":
            return OrFormula(args=tuple(self.formula(a) for a in args), pos=self.pos(node))
        if head == "not":
            if len(args) != 1:
                raise self.error(node, "(not <formula>)")
            return NotFormula(arg=self.formula(args[0]), pos=self.pos(node))
        if head == "imply":
            if len(args) != 2:
                raise self.error(node, "(imply <formula> <formula>)")
            return ImplyFormula(antecedent=self.formula(args[0]), consequent=self.formula(args[1]), pos=self.pos(node))
        if head == "=":
            if len(args) != 2:
                raise self.error(node, "(= <term> <term>)")
            return EqualsFormula(left=self.term(args[0]), right=self.term(args[1]), pos=self.pos(node))
        if head in _UNSUPPORTED_FORMULAS:
            raise self.error(node.items[0], "a supported formula", head)
        return self.atom(node)

    def literal(self, node: SExpr, spec: Optional[TimeSpecifier]) -> TimedEffect:
        node = self.slist(node, "an effect literal")
        if node.head() == "not":
            if len(node) != 2:
                raise self.error(node, "(not <atom>)")
            inner = self.slist(node.items[1], "an atom")
            return TimedEffect(spec=spec, atom=self.atom(inner), negated=True, pos=self.pos(node))
        if node.head() in _NUMERIC_EFFECTS or node.head() in _UNSUPPORTED_FORMULAS:
            raise self.error(node.items[0], "a supported effect", node.head())
        return TimedEffect(spec=spec, atom=self.atom(node), pos=self.pos(node))

    def effects(self, node: SExpr, spec: Optional[TimeSpecifier]) -> Iterator[TimedEffect]:
        node = self.slist(node, "an effect")
        if node.head() == "and":
            for item in node.items[1:]:
                yield from self.effects(item, spec)
        else:
            yield self.literal(node, spec)

    def time_specifier(self, node: SList, allowed: Sequence[TimeSpecifier]) -> tuple[TimeSpecifier, SExpr]:
        words = [i.text for i in node.items[:2] if isinstance(i, Symbol)]
        spec_text = " ".join(words)
        for spec in allowed:
            if spec_text == spec.value and len(node) == 3:
                return spec, node.items[2]
        expected = " or ".join(f"({s.value} ...)" for s in allowed)
        raise self.error(node, expected)

    def keyword_args(self, items: Sequence[SExpr]) -> dict[str, tuple[Symbol, SExpr]]:
        result: dict[str, tuple[Symbol, SExpr]] = {}
        if len(items) % 2:
            raise self.error(items[-1], "a value after the keyword")
        for key, value in zip(items[::2], items[1::2]):
            keyword = self.symbol(key, "a keyword")
            if not keyword.text.startswith(":") or keyword.text in result:
                raise self.error(keyword, "a distinct keyword")
            result[keyword.text] = (keyword, value)
        return result


class _DomainReader(_Reader):
    def __init__(self) -> None:
        super().__init__(FileRole.Domain)

    def read(self, text: str) -> DomainAst:
        define = self._define(text)
        header = self.slist(define.items[1] if len(define) > 1 else None, "(domain <name>)", head="domain")
        if len(header) != 2:
            raise self.error(header, "(domain <name>)")
        fields: dict[str, list[Any]] = {k: [] for k in ("requirements", "types", "constants", "predicates", "functions", "schemata")}
        for section in define.items[2:]:
            section = self.slist(section, "a domain section")
            head = section.head()
            body = section.items[1:]
            if head == ":requirements":
                fields["requirements"].extend(self._requirements(body))
            elif head == ":types":
                fields["types"].extend(self._types(body))
            elif head == ":constants":
                fields["constants"].extend(self.typed_list(body, variables=False))
            elif head == ":predicates":
                fields["predicates"].extend(self._declaration(n) for n in body)
            elif head == ":functions":
                fields["functions"].extend(self._functions(body))
            elif head == ":durative-action":
                fields["schemata"].append(self._durative_action(section))
            elif head == ":action":
                fields["schemata"].append(self._action(section))
            else:
                raise self.error(section.items[0] if section.items else section, "a supported domain section", head or "()")
        requirements = tuple(dict.fromkeys(fields.pop("requirements")))
        return DomainAst(
            name=self.name(header.items[1], "a domain name"),
            requirements=requirements,
            **{k: tuple(v) for k, v in fields.items()},
            pos=self.pos(define),
        )

    def _define(self, text: str) -> SList:
        exprs = read_sexprs(text, self.role)
        if len(exprs) != 1:
            raise self.error(exprs[1] if len(exprs) > 1 else None, "a single (define ...) form")
        return self.slist(exprs[0], "(define ...)", head="define")

    def _requirements(self, body: Sequence[SExpr]) -> Iterator[Requirement]:
        for node in body:
            flag = self.symbol(node, "a requirement flag")
            try:
                yield Requirement(flag.text)
            except ValueError:
                raise UnsupportedRequirement(flag.text, self.role, flag.line, flag.column) from None

    def _types(self, body: Sequence[SExpr]) -> Iterator[TypeDecl]:
        for typed in self.typed_list(body, variables=False):
            yield TypeDecl(name=typed.name, parent=typed.type, pos=typed.pos)

    def _declaration(self, node: SExpr) -> PredicateDecl:
        node = self.slist(node, "a declaration (<name> <typed variables>)")
        return PredicateDecl(
            name=self.name(node.items[0] if node.items else None, "a declared name"),
            parameters=tuple(self.typed_list(node.items[1:], variables=True)),
            pos=self.pos(node),
        )

    def _functions(self, body: Sequence[SExpr]) -> Iterator[PredicateDecl]:
        i = 0
        while i < len(body):
            node = body[i]
            if isinstance(node, Symbol) and node.text == "-":
                result_type = body[i + 1] if i + 1 < len(body) else None
                if not isinstance(result_type, Symbol) or result_type.text != "number":
                    raise self.error(result_type, "'number'", None if result_type else "end of section")
                i += 2
                continue
            yield self._declaration(node)
            i += 1

    def _parameters(self, args: dict[str, tuple[Symbol, SExpr]]) -> tuple[TypedName, ...]:
        if ":parameters" not in args:
            return ()
        return tuple(self.typed_list(self.slist(args[":parameters"][1], "a parameter list").items, variables=True))

    def _durative_action(self, section: SList) -> ActionSchemaAst:
        name = self.name(section.items[1] if len(section) > 1 else None, "an action name")
        args = self.keyword_args(section.items[2:])
        self._reject_unknown_keys(args, {":parameters", ":duration", ":condition", ":effect"})
        if ":duration" not in args:
            raise self.error(section, f"a :duration for durative action '{name}'")
        conditions: list[TimedCondition] = []
        if ":condition" in args:
            conditions.extend(self._timed_conditions(args[":condition"][1]))
        effects: list[TimedEffect] = []
        if ":effect" in args:
            effects.extend(self._timed_effects(args[":effect"][1]))
        return self.build(
            section,
            ActionSchemaAst,
            name=name,
            parameters=self._parameters(args),
            durative=True,
            duration=tuple(self._duration(args[":duration"][1])),
            conditions=tuple(conditions),
            effects=tuple(effects),
            pos=self.pos(section),
        )

    def _action(self, section: SList) -> ActionSchemaAst:
        name = self.name(section.items[1] if len(section) > 1 else None, "an action name")
        args = self.keyword_args(section.items[2:])
        self._reject_unknown_keys(args, {":parameters", ":precondition", ":effect"})
        conditions = ()
        if ":precondition" in args and not self._is_empty(args[":precondition"][1]):
            conditions = (TimedCondition(spec=None, formula=self.formula(args[":precondition"][1])),)
        effects: tuple[TimedEffect, ...] = ()
        if ":effect" in args and not self._is_empty(args[":effect"][1]):
            effects = tuple(self.effects(args[":effect"][1], None))
        return self.build(
            section,
            ActionSchemaAst,
            name=name,
            parameters=self._parameters(args),
            durative=False,
            conditions=conditions,
            effects=effects,
            pos=self.pos(section),
        )

    def _reject_unknown_keys(self, args: dict[str, tuple[Symbol, SExpr]], known: set[str]) -> None:
        for key, (keyword, _) in args.items():
            if key not in known:
                raise self.error(keyword, "one of " + ", ".join(sorted(known)), key)

    @staticmethod
    def _is_empty(node: SExpr) -> bool:
        return isinstance(node, SList) and len(node) == 0

    def _duration(self, node: SExpr) -> Iterator[DurationConstraint]:
        node = self.slist(node, "a duration constraint")
        if node.head() == "and":
            for item in node.items[1:]:
                yield from self._duration(item)
            return
        try:
            comparison = DurationComparison(node.head())
        except ValueError:
            raise self.error(node, "(= ?duration ...), (<= ?duration ...) or (>= ?duration ...)") from None
        if len(node) != 3 or not isinstance(node.items[1], Symbol) or node.items[1].text != "?duration":
            raise self.error(node, f"({comparison.value} ?duration <value>)")
        yield DurationConstraint(comparison=comparison, value=self._duration_value(node.items[2]), pos=self.pos(node))

    def _duration_value(self, node: SExpr) -> Fraction | FunctionTerm:
        if isinstance(node, Symbol):
            return rational_from_decimal(node.text, self.role, node.line, node.column)
        if not node.items or node.head() in _ARITHMETIC:
            raise self.error(node, "a number or a function term", "arithmetic expression" if node.items else "()")
        return FunctionTerm(
            name=self.name(node.items[0], "a function name"),
            args=tuple(self.term(a) for a in node.items[1:]),
            pos=self.pos(node),
        )

    def _timed_conditions(self, node: SExpr) -> Iterator[TimedCondition]:
        node = self.slist(node, "a condition")
        if not node.items:
            return
        if node.head() == "and":
            for item in node.items[1:]:
                yield from self._timed_conditions(item)
            return
        spec, formula = self.time_specifier(node, list(TimeSpecifier))
        yield TimedCondition(spec=spec, formula=self.formula(formula), pos=self.pos(node))

    def _timed_effects(self, node: SExpr) -> Iterator[TimedEffect]:
        node = self.slist(node, "an effect")
        if not node.items:
            return
        if node.head() == "and":
            for item in node.items[1:]:
                yield from self._timed_effects(item)
            return
        spec, effect = self.time_specifier(node, [TimeSpecifier.AtStart, TimeSpecifier.AtEnd])
        yield from self.effects(effect, spec)


class _ProblemReader(_Reader):
    def __init__(self) -> None:
        super().__init__(FileRole.Problem)

    def read(self, text: str) -> ProblemAst:
        exprs = read_sexprs(text, self.role)
        if len(exprs) != 1:
            raise self.error(exprs[1] if len(exprs) > 1 else None, "a single (define ...) form")
        define = self.slist(exprs[0], "(define ...)", head="define")
        header = self.slist(define.items[1] if len(define) > 1 else None, "(problem <name>)", head="problem")
        if len(header) != 2:
            raise self.error(header, "(problem <name>)")
        domain_name: Optional[str] = None
        objects: list[TypedName] = []
        init: list[AtomFormula] = []
        assignments: list[FunctionAssignment] = []
        goal: Optional[FormulaAst] = None
        for section in define.items[2:]:
            section = self.slist(section, "a problem section")
            head = section.head()
            body = section.items[1:]
            if head == ":domain" and len(body) == 1:
                domain_name = self.name(body[0], "a domain name")
            elif head == ":objects":
                objects.extend(self.typed_list(body, variables=False))
            elif head == ":init":
                for fact in body:
                    self._fact(fact, init, assignments)
            elif head == ":goal" and len(body) == 1:
                goal = self.formula(body[0])
            else:
                raise self.error(section.items[0] if section.items else section, "a supported problem section", head or "()")
        if domain_name is None:
            raise self.error(define, "a (:domain <name>) section")
        if goal is None:
            raise self.error(define, "a (:goal <formula>) section")
        return self.build(
            define,
            ProblemAst,
            name=self.name(header.items[1], "a problem name"),
            domain_name=domain_name,
            objects=tuple(objects),
            init=tuple(init),
            assignments=tuple(assignments),
            goal=goal,
            pos=self.pos(define),
        )

    def _fact(self, node: SExpr, init: list[AtomFormula], assignments: list[FunctionAssignment]) -> None:
        node = self.slist(node, "an initial fact")
        if node.head() == "=":
            if len(node) != 3 or not isinstance(node.items[1], SList) or not isinstance(node.items[2], Symbol):
                raise self.error(node, "(= (<function> <objects>) <number>)")
            term_node = node.items[1]
            value = node.items[2]
            term = FunctionTerm(
                name=self.name(term_node.items[0] if term_node.items else None, "a function name"),
                args=tuple(self.name(a, "an object name") for a in term_node.items[1:]),
                pos=self.pos(term_node),
            )
            number = rational_from_decimal(value.text, self.role, value.line, value.column)
            assignments.append(FunctionAssignment(term=term, value=number, pos=self.pos(node)))
        elif node.head() in ("not", "and", "or"):
            raise self.error(node, "a ground atom or function assignment")
        else:
            init.append(self.atom(node))


def parse_domain(text: str) -> DomainAst:
    """Parses a PDDL domain.

    Args:
        text (str): Domain source text.

    Returns:
        DomainAst: The parsed domain.
    """
    domain = _DomainReader().read(text)
    logger.debug("Parsed domain '%s' with %d schemata", domain.name, len(domain.schemata))
    return domain


def parse_problem(text: str) -> ProblemAst:
    """Parses a PDDL problem.

    Args:
        text (str): Problem source text.

    Returns:
        ProblemAst: The parsed problem.
    """
    problem = _ProblemReader().read(text)
    logger.debug("Parsed problem '%s' with %d objects", problem.name, len(problem.objects))
    return problem


def _plan_line_grammar() -> ParserElement:
    number = Regex(DECIMAL_PATTERN)
    name = Regex(r"[^()\[\]:;\s]+")
    action = Suppress("(") + name("name") + Group(ZeroOrMore(name))("args") + Suppress(")")
    line = number("time") + Suppress(":") + action + Opt(Suppress("[") + number("duration") + Suppress("]"))
    return line


_PLAN_LINE = _plan_line_grammar()


def _plan_number(text: str, line: int, column: int) -> Fraction:
    value = rational_from_decimal(text, FileRole.Plan, line, column)
    if value < 0:
        raise ValidationError(ValidationErrorKind.NegativeValue, step=line, time=value, detail=f"'{text}' at column {column}")
    return value


def parse_plan(text: str) -> PlanAst:
    """Parses a timed plan, one `<time>: (<name> <args>*)[<duration>]` step per line.

    Steps are kept in file order. Blank lines and `;` comments are skipped.

    Args:
        text (str): Plan source text.

    Returns:
        PlanAst: The parsed plan.
    """
    steps: list[PlanStep] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split(";", 1)[0]
        if not content.strip():
            continue
        try:
            tokens = _PLAN_LINE.parse_string(content, parse_all=True)
        except ParseBaseException as e:
            found = repr(content[e.loc]) if e.loc < len(content) else "end of line"
            raise ParseError(FileRole.Plan, number, e.col, "'<time>: (<action> <args>*)[<duration>]'", found) from None
        column = len(content) - len(content.lstrip()) + 1
        duration = None
        if "duration" in tokens:
            duration = _plan_number(tokens["duration"], number, content.rindex("[") + 2)
        steps.append(
            PlanStep(
                time=_plan_number(tokens["time"], number, column),
                name=tokens["name"].lower(),
                args=tuple(a.lower() for a in tokens["args"]),
                duration=duration,
                line=number,
            )
        )
    logger.debug("Parsed plan with %d steps", len(steps))
    return PlanAst(steps=tuple(steps))
