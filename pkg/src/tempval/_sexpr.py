from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from pyparsing import (
    CharsNotIn,
    Empty,
    Forward,
    Group,
    ParseBaseException,
    ParserElement,
    ParseResults,
    Suppress,
    ZeroOrMore,
    col,
    lineno,
    rest_of_line,
)

from .enums import FileRole
from .exceptions import ParseError

__all__ = ("SExpr", "SList", "Symbol", "read_sexprs")


@dataclass(frozen=True)
class Symbol:
    text: str
    line: int
    column: int

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class SList:
    items: tuple[SExpr, ...]
    line: int
    column: int

    def __len__(self) -> int:
        return len(self.items)

    def head(self) -> str:
        """Text of the first element when it is a symbol, else an empty string."""
        first = self.items[0] if self.items else None
        return first.text if isinstance(first, Symbol) else ""

    def __str__(self) -> str:
        return f"({' '.join(str(i) for i in self.items)})"


SExpr = Union[Symbol, SList]


def _make_symbol(s: str, loc: int, toks: ParseResults) -> Symbol:
    return Symbol(toks[0].lower(), lineno(loc, s), col(loc, s))


def _make_list(s: str, loc: int, toks: ParseResults) -> SList:
    return SList(tuple(toks[0]), lineno(loc, s), col(loc, s))


def _grammar() -> ParserElement:
    atom = (Empty() + CharsNotIn("() \t\r\n;")).set_parse_action(_make_symbol)
    nested = Forward()
    nested <<= (Suppress("(") + Group(ZeroOrMore(atom | nested)) + Suppress(")")).set_parse_action(_make_list)
    document = ZeroOrMore(nested | atom)
    document.ignore(";" + rest_of_line)
    return document


_DOCUMENT = _grammar()


def read_sexprs(text: str, role: FileRole) -> list[SExpr]:
    """Reads every top-level s-expression of `text`; symbols are lowercased and `;` comments dropped."""
    try:
        return list(_DOCUMENT.parse_string(text, parse_all=True))
    except ParseBaseException as e:
        found = repr(text[e.loc]) if e.loc < len(text) else "end of input"
        expected = "balanced parentheses" if found in ("'('", "')'", "end of input") else e.msg
        raise ParseError(role, e.lineno, e.col, expected, found) from None
    except RecursionError:
        raise ParseError(role, 1, 1, "a nesting depth the reader can handle", "deeply nested expression") from None
