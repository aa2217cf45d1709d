"""Recursive-descent parser for the published expression grammar.

Grammar (see docs/grammar.ebnf)::

    expr    = term { ("+" | "-") term }
    term    = factor { ("*" | "/") factor }
    factor  = "-" factor | power
    power   = atom [ "^" factor ]          # right associative
    atom    = NUMBER | "x" | FUNC "(" expr ")" | "(" expr ")"
    FUNC    = "exp" | "log" | "sqrt" | "abs" | "sin" | "cos"

Precedence, tightest first: ``^``, unary ``-``, ``* /``, ``+ -``.
``a^b`` becomes an integer-power node when ``b`` constant-folds to an
integer; otherwise it desugars to ``exp(b*log(a))``, which raises a domain
error at evaluation time if the base can reach values <= 0.

Errors carry a 1-based character position.
"""

from __future__ import annotations

from dataclasses import dataclass

from .expr import (
    Abs,
    Const,
    Cos,
    Exp,
    Expr,
    Log,
    Sin,
    Sqrt,
    Var,
    fold_add,
    fold_div,
    fold_mul,
    fold_neg,
    fold_powint,
    fold_sub,
)

__all__ = ["parse", "ParseError"]

_FUNCTIONS = {"exp": Exp, "log": Log, "sqrt": Sqrt, "abs": Abs, "sin": Sin, "cos": Cos}


class ParseError(ValueError):
    """Syntax or identifier error, with 1-based ``position``."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


@dataclass(frozen=True)
class _Token:
    kind: str  # "num" | "ident" | "op"
    text: str
    pos: int  # 1-based offset of the first character
    value: float = 0.0


def _tokenize(source: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(source)
    while i < n:
        c = source[i]
        if c.isspace():
            i += 1
            continue
        start = i
        if c.isdigit() or (c == "." and i + 1 < n and source[i + 1].isdigit()):
            i += 1
            while i < n and (source[i].isdigit() or source[i] == "."):
                i += 1
            if i < n and source[i] in "eE":
                j = i + 1
                if j < n and source[j] in "+-":
                    j += 1
                if j < n and source[j].isdigit():
                    i = j + 1
                    while i < n and source[i].isdigit():
                        i += 1
            text = source[start:i]
            try:
                value = float(text)
            except ValueError:
                raise ParseError(f"malformed number {text!r}", start + 1) from None
            tokens.append(_Token("num", text, start + 1, value))
            continue
        if c.isalpha() or c == "_":
            i += 1
            while i < n and (source[i].isalnum() or source[i] == "_"):
                i += 1
            tokens.append(_Token("ident", source[start:i], start + 1))
            continue
        if c in "+-*/^()":
            tokens.append(_Token("op", c, start + 1))
            i += 1
            continue
        raise ParseError(f"unexpected character {c!r}", i + 1)
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = _tokenize(source)
        self.index = 0

    def peek(self) -> _Token | None:
        if self.index < len(self.tokens):
            return self.tokens[self.index]
        return None

    def advance(self) -> _Token:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", len(self.source) + 1)
        self.index += 1
        return tok

    def expect_op(self, text: str, context_pos: int, what: str) -> None:
        tok = self.peek()
        if tok is None or tok.kind != "op" or tok.text != text:
            raise ParseError(what, context_pos)
        self.index += 1

    def parse(self) -> Expr:
        e = self.expr()
        tok = self.peek()
        if tok is not None:
            raise ParseError(f"unexpected {tok.text!r}", tok.pos)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while (tok := self.peek()) is not None and tok.kind == "op" and tok.text in "+-":
            self.index += 1
            rhs = self.term()
            e = fold_add(e, rhs) if tok.text == "+" else fold_sub(e, rhs)
        return e

    def term(self) -> Expr:
        e = self.factor()
        while (tok := self.peek()) is not None and tok.kind == "op" and tok.text in "*/":
            self.index += 1
            rhs = self.factor()
            e = fold_mul(e, rhs) if tok.text == "*" else fold_div(e, rhs)
        return e

    def factor(self) -> Expr:
        tok = self.peek()
        if tok is not None and tok.kind == "op" and tok.text == "-":
            self.index += 1
            return fold_neg(self.factor())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        tok = self.peek()
        if tok is not None and tok.kind == "op" and tok.text == "^":
            self.index += 1
            exponent = self.factor()  # right associative, allows signed exponent
            return _make_power(base, exponent)
        return base

    def atom(self) -> Expr:
        tok = self.advance()
        if tok.kind == "num":
            return Const(tok.value)
        if tok.kind == "ident":
            if tok.text == "x":
                return Var()
            ctor = _FUNCTIONS.get(tok.text)
            if ctor is None:
                raise ParseError(f"unknown identifier {tok.text!r}", tok.pos)
            self.expect_op("(", tok.pos, f"expected '(' after {tok.text!r}")
            arg = self._group(tok.pos, f"unclosed call to {tok.text!r}")
            return ctor(arg)
        if tok.kind == "op" and tok.text == "(":
            return self._group(tok.pos, "unclosed parenthesis")
        raise ParseError(f"unexpected {tok.text!r}", tok.pos)

    def _group(self, open_pos: int, unclosed_msg: str) -> Expr:
        """Parse the inside of parentheses; input ending inside the group is
        reported at the opening position."""
        try:
            e = self.expr()
        except ParseError as exc:
            if exc.position > len(self.source):
                raise ParseError(unclosed_msg, open_pos) from None
            raise
        self.expect_op(")", open_pos, unclosed_msg)
        return e


def _make_power(base: Expr, exponent: Expr) -> Expr:
    if isinstance(exponent, Const) and float(exponent.value).is_integer():
        return fold_powint(base, int(exponent.value))
    # general real power: exp(b * log a); evaluation rejects bases <= 0
    return Exp(fold_mul(exponent, Log(base)))


def parse(text: str) -> Expr:
    """Parse ``text`` into an expression tree."""
    return _Parser(text).parse()
