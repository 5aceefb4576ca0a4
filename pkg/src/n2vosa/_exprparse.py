"""Small recursive-descent parser for the textual grammars used in fixtures.

The grammar is shared by scalars, Grassmann elements and NS algebra elements:

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor (['*'|'/'] factor)*
    factor := number | atom | '(' expr ')' | '-' factor

Atoms are resolved by a caller supplied callback, so each module decides
what identifiers such as ``r2``, ``t3`` or ``G+(1/2)`` mean.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Callable, List, Tuple

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>\d+(?:\.\d+)?)"
    r"|(?P<atom>G[+-]\([^()]*\)|[A-Za-z][A-Za-z0-9_]*(?:\([^()]*\))?)"
    r"|(?P<op>[-+*/()])"
    r")"
)


class ParseError(ValueError):
    """Raised when a textual element cannot be parsed."""


def tokenize(text: str) -> List[Tuple[str, str]]:
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None or match.end() == pos:
            raise ParseError(f"unexpected input at {pos}: {text[pos:pos + 10]!r}")
        pos = match.end()
        for kind in ("num", "atom", "op"):
            value = match.group(kind)
            if value is not None:
                tokens.append((kind, value))
                break
    return tokens


class ExpressionParser:
    """Evaluate an expression using the supplied atom and number handlers."""

    def __init__(self, atom: Callable[[str], object], number: Callable[[Fraction], object]):
        self.atom = atom
        self.number = number
        self.tokens: List[Tuple[str, str]] = []
        self.pos = 0

    def parse(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0
        if not self.tokens:
            raise ParseError("empty expression")
        value = self._expr()
        if self.pos != len(self.tokens):
            raise ParseError(f"trailing tokens in {text!r}")
        return value

    def _peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def _take(self):
        token = self._peek()
        self.pos += 1
        return token

    def _expr(self):
        kind, value = self._peek()
        negate = False
        if kind == "op" and value in "+-":
            self._take()
            negate = value == "-"
        result = self._term()
        if negate:
            result = -result
        while True:
            kind, value = self._peek()
            if kind == "op" and value in "+-":
                self._take()
                rhs = self._term()
                result = result + rhs if value == "+" else result - rhs
            else:
                return result

    def _term(self):
        result = self._factor()
        while True:
            kind, value = self._peek()
            if kind == "op" and value == "*":
                self._take()
                result = result * self._factor()
            elif kind == "op" and value == "/":
                self._take()
                divisor = self._factor()
                result = _divide(result, divisor)
            else:
                return result

    def _factor(self):
        kind, value = self._take()
        if kind == "num":
            return self.number(Fraction(value))
        if kind == "atom":
            return self.atom(value)
        if kind == "op" and value == "(":
            result = self._expr()
            closing = self._take()
            if closing != ("op", ")"):
                raise ParseError("missing closing parenthesis")
            return result
        if kind == "op" and value == "-":
            return -self._factor()
        raise ParseError(f"unexpected token {value!r}")


def _divide(numerator, denominator):
    inverse = getattr(denominator, "inverse", None)
    if inverse is None:
        raise ParseError("division by a non-invertible value")
    return numerator * inverse()
