"""Text syntax for formulae.

Grammar, loosest binding first::

    formula  := or
    or       := and {"or" and}
    and      := unary {"and" unary}
    unary    := "not" unary | temporal | atom
    temporal := ("F" | "G") "[" int "," int "]" "(" formula ")"
              | "(" formula ")" ["U" "[" int "," int "]" "(" formula ")"]
    atom     := "x" int (">=" | "<=") real | "true"

Both interval bounds are sample counts.  Errors carry the 1-based line and
column where parsing stopped.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError
from .formula import GE, LE, And, Eventually, Formula, Globally, Not, Or, Pred, TrueNode, Until

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>[-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?)
  | (?P<cmp>>=|<=)
  | (?P<punct>[()\[\],])
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)

_KEYWORDS = {"not", "and", "or", "true", "F", "G", "U"}


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        column = pos - line_start + 1
        if match.lastgroup == "ws":
            chunk = match.group()
            newlines = chunk.count("\n")
            if newlines:
                line += newlines
                line_start = pos + chunk.rindex("\n") + 1
        elif match.lastgroup == "word":
            word = match.group()
            if word in _KEYWORDS:
                tokens.append(_Token(word, word, line, column))
            elif re.fullmatch(r"x\d+", word):
                tokens.append(_Token("var", word, line, column))
            else:
                raise ParseError(f"unknown identifier {word!r}", line, column)
        elif match.lastgroup == "number":
            tokens.append(_Token("number", match.group(), line, column))
        else:
            tokens.append(_Token(match.group(), match.group(), line, column))
        pos = match.end()
    tokens.append(_Token("end", "end of input", line, len(text) - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def expect(self, kind: str, what: str) -> _Token:
        token = self.peek()
        if token.kind != kind:
            raise ParseError(f"expected {what}, found {token.text!r}", token.line, token.column)
        return self.advance()

    def fail(self, message: str):
        token = self.peek()
        raise ParseError(message, token.line, token.column)

    def parse_or(self) -> Formula:
        phi = self.parse_and()
        while self.peek().kind == "or":
            self.advance()
            phi = Or(phi, self.parse_and())
        return phi

    def parse_and(self) -> Formula:
        phi = self.parse_unary()
        while self.peek().kind == "and":
            self.advance()
            phi = And(phi, self.parse_unary())
        return phi

    def parse_unary(self) -> Formula:
        token = self.peek()
        if token.kind == "not":
            self.advance()
            return Not(self.parse_unary())
        if token.kind in ("F", "G"):
            self.advance()
            lo, hi = self.parse_interval()
            self.expect("(", "'('")
            child = self.parse_or()
            self.expect(")", "')'")
            node = Eventually if token.kind == "F" else Globally
            return node(lo, hi, child)
        if token.kind == "(":
            self.advance()
            phi = self.parse_or()
            self.expect(")", "')'")
            if self.peek().kind == "U":
                self.advance()
                lo, hi = self.parse_interval()
                self.expect("(", "'('")
                psi = self.parse_or()
                self.expect(")", "')'")
                return Until(lo, hi, phi, psi)
            return phi
        if token.kind == "var":
            self.advance()
            cmp_token = self.peek()
            if cmp_token.kind not in (GE, LE):
                self.fail(f"expected '>=' or '<=' after {token.text!r}")
            self.advance()
            number = self.expect("number", "a threshold value")
            return Pred(int(token.text[1:]), cmp_token.kind, float(number.text))
        if token.kind == "true":
            self.advance()
            return TrueNode()
        self.fail(f"expected a formula, found {token.text!r}")

    def parse_interval(self) -> tuple[int, int]:
        self.expect("[", "'['")
        lo = self.parse_bound()
        self.expect(",", "','")
        hi = self.parse_bound()
        closing = self.expect("]", "']'")
        if lo > hi:
            raise ParseError(
                f"interval lower bound exceeds upper bound: [{lo},{hi}]", closing.line, closing.column
            )
        return lo, hi

    def parse_bound(self) -> int:
        token = self.expect("number", "an integer interval bound")
        value = float(token.text)
        if value != int(value):
            raise ParseError(f"interval bound must be an integer, got {token.text}", token.line, token.column)
        if value < 0:
            raise ParseError(f"interval bound must be non-negative, got {token.text}", token.line, token.column)
        return int(value)


def parse_formula(text: str) -> Formula:
    """Parse formula text, raising ParseError with position info on bad input."""
    parser = _Parser(_tokenize(text))
    phi = parser.parse_or()
    token = parser.peek()
    if token.kind != "end":
        raise ParseError(f"unexpected trailing input {token.text!r}", token.line, token.column)
    return phi
