from enum import Enum

__all__ = (
    "DurationComparison",
    "FileRole",
    "HappeningPath",
    "InvariantSemantics",
    "Mutation",
    "Requirement",
    "TimeSpecifier",
    "ValidationErrorKind",
    "Verdict",
    "WfErrorCategory",
)


class Requirement(str, Enum):
    """PDDL requirement flags accepted by the parser."""

    Strips = ":strips"
    Equality = ":equality"
    Typing = ":typing"
    NegativePreconditions = ":negative-preconditions"
    DisjunctivePreconditions = ":disjunctive-preconditions"
    DurativeActions = ":durative-actions"
    DurationInequalities = ":duration-inequalities"


class TimeSpecifier(str, Enum):
    """Temporal annotations of durative-action conditions and effects."""

    AtStart = "at start"
    AtEnd = "at end"
    OverAll = "over all"


class DurationComparison(str, Enum):
    Eq = "="
    Leq = "<="
    Geq = ">="


class FileRole(str, Enum):
    """Kinds of input files."""

    Domain = "domain"
    Problem = "problem"
    Plan = "plan"


class WfErrorCategory(str, Enum):
    """Categories of well-formedness errors."""

    UndeclaredName = "undeclared-name"
    ArityMismatch = "arity-mismatch"
    TypeMismatch = "type-mismatch"
    DurationViolation = "duration-violation"
    UndefinedFunctionValue = "undefined-function-value"
    DuplicateDefinition = "duplicate-definition"
    MissingRequirement = "missing-requirement"


class ValidationErrorKind(str, Enum):
    """Ways in which a plan can fail to execute."""

    PreconditionUnsatisfied = "precondition-unsatisfied"
    Interference = "interference"
    GoalUnsatisfied = "goal-unsatisfied"
    NegativeValue = "negative-value"

    @property
    def message(self) -> str:
        return _VALIDATION_MESSAGES[self]


_VALIDATION_MESSAGES = {
    ValidationErrorKind.PreconditionUnsatisfied: "Precondition not satisfied",
    ValidationErrorKind.Interference: "Actions in happening interfering",
    ValidationErrorKind.GoalUnsatisfied: "Postcondition does not hold",
    ValidationErrorKind.NegativeValue: "Negative time or duration",
}


class Verdict(str, Enum):
    """Outcome of a validation run."""

    Valid = "valid"
    Invalid = "invalid"
    IllFormed = "ill-formed"
    ParseError = "parse-error"


class InvariantSemantics(str, Enum):
    """Interval over which an over-all condition is required to hold.

    `Strict` checks the invariant only strictly inside (t, t+d); `RightClosed` also checks it against the
    state reached just before the end snap action executes at t+d.
    """

    Strict = "strict"
    RightClosed = "right-closed"


class HappeningPath(str, Enum):
    """Data structure used to build the happening sequence."""

    List = "list"
    Balanced = "balanced"
    Auto = "auto"


class Mutation(str, Enum):
    """Deliberate semantic bugs used to check that the differential tests have teeth."""

    InvariantOffByOne = "invariant-off-by-one"
    MissedEndSnap = "missed-end-snap"
    DeleteAfterAdd = "delete-after-add"
    UnsortedHappenings = "unsorted-happenings"
    SkippedInterference = "skipped-interference"
