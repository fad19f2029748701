"""Exact decimal literals.

Every time point, duration and numeric value is a `fractions.Fraction`; floats never enter the pipeline.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .enums import FileRole
from .exceptions import ParseError

__all__ = ("DECIMAL_PATTERN", "rational_from_decimal", "render_rational")

DECIMAL_PATTERN = r"[+-]?\d+(?:\.\d+)?"
_DECIMAL = re.compile(DECIMAL_PATTERN)
_DECIMAL_PREFIX = re.compile(r"[+-]?(?:\d+(?:\.\d*)?)?")


def rational_from_decimal(text: str, role: FileRole | str = FileRole.Plan, line: int = 1, column: int = 1) -> Fraction:
    """Converts a finite decimal literal to an exact rational.

    Args:
        text (str): Literal with an optional sign and optional fraction part, e.g. "1.25".
        role (FileRole | str): Input the literal comes from, used for error reporting. Defaults to plan.
        line (int): Line of the literal. Defaults to 1.
        column (int): Column of the first character of the literal. Defaults to 1.

    Returns:
        Fraction: The exact value in lowest terms.
    """
    if _DECIMAL.fullmatch(text):
        return Fraction(text)
    prefix = _DECIMAL_PREFIX.match(text)
    offset = prefix.end() if prefix else 0
    found = repr(text[offset]) if offset < len(text) else "end of number"
    raise ParseError(role, line, column + offset, "a decimal number", found)


def render_rational(value: Fraction) -> str:
    """Renders a rational as an exact decimal when it terminates, otherwise as `p/q`."""
    denominator = value.denominator
    twos = fives = 0
    while denominator % 2 == 0:
        denominator //= 2
        twos += 1
    while denominator % 5 == 0:
        denominator //= 5
        fives += 1
    if denominator != 1:
        return f"{value.numerator}/{value.denominator}"

    digits = max(twos, fives)
    scaled = abs(value.numerator) * 10**digits // value.denominator
    sign = "-" if value < 0 else ""
    if digits == 0:
        return f"{sign}{scaled}"
    whole, fraction = divmod(scaled, 10**digits)
    return f"{sign}{whole}.{fraction:0{digits}d}"
