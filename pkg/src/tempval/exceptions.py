from __future__ import annotations

from fractions import Fraction
from typing import TYPE_CHECKING, Optional, Sequence

from .enums import FileRole, ValidationErrorKind

if TYPE_CHECKING:
    from .wellformedness import WfError

__all__ = (
    "GroundingError",
    "ParseError",
    "TempvalError",
    "UnsupportedRequirement",
    "ValidationError",
    "WellFormednessError",
)


class TempvalError(Exception):
    """Base class of every error raised by tempval."""


class ParseError(TempvalError, ValueError):
    """Raised when a domain, problem or plan file cannot be read.

    Args:
        role (FileRole | str): Which input the error was found in.
        line (int): 1-based line of the offending token.
        column (int): 1-based column of the offending token.
        expected (str): Description of what the parser expected.
        found (str): The token found instead.
    """

    def __init__(self, role: FileRole | str, line: int, column: int, expected: str, found: str) -> None:
        self.role = FileRole(role)
        self.line = line
        self.column = column
        self.expected = expected
        self.found = found
        super().__init__(f"{self.role.value}:{line}:{column}: expected {expected}, found {found}")


class UnsupportedRequirement(ParseError):
    def __init__(self, flag: str, role: FileRole | str, line: int, column: int) -> None:
        self.flag = flag
        super().__init__(role, line, column, "a supported requirement", flag)


class WellFormednessError(TempvalError):
    """Raised with every well-formedness error found in the inputs."""

    def __init__(self, errors: Sequence[WfError]) -> None:
        self.errors = list(errors)
        super().__init__("ill-formed: " + "; ".join(str(e) for e in self.errors))


class GroundingError(TempvalError):
    pass


class ValidationError(TempvalError):
    """Raised when a plan fails to execute.

    Args:
        kind (ValidationErrorKind): What went wrong.
        step (Optional[int]): 1-based index of the failing happening, or plan line for negative values.
        time (Optional[Fraction]): Time point of the failing happening.
        actions (Sequence[str]): Labels of the offending snap actions.
        detail (str): Free-form context, e.g. the unsatisfied formula.
    """

    def __init__(
        self,
        kind: ValidationErrorKind,
        step: Optional[int] = None,
        time: Optional[Fraction] = None,
        actions: Sequence[str] = (),
        detail: str = "",
    ) -> None:
        self.kind = kind
        self.step = step
        self.time = time
        self.actions = tuple(actions)
        self.detail = detail
        message = kind.message
        if detail:
            message += f": {detail}"
        if step is not None:
            message = f"at step {step}: {message}"
        super().__init__(message)
