"""ASCII expressions for operator and phase-space polynomials.

Grammar (whitespace is ignored)::

    expr     := term (("+" | "-") term)*
    term     := unary ("*" unary)*
    unary    := "-" unary | power
    power    := atom ("^" exponent)?
    exponent := "-"? INT
    atom     := INT ("/" INT)? | NAME | "(" expr ")"
    NAME     := "q" | "p" | "qh" | "ph" | "hbar" | "i" | "pi"

``qh``/``ph`` are the operators and only appear in operator mode; ``q``/``p``
are phase-space variables and only appear in phase mode.  Products in
operator mode keep their written order.  Negative exponents are accepted
only on single graded constants such as ``hbar^-1`` or ``(2*pi)^-1``, which
the canonical rendering emits.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .algebra import (
    HBAR,
    I,
    PH,
    QH,
    OperatorPoly,
    PhasePoly,
    ScalarSum,
)

OPERATOR = "operator"
PHASE = "phase"

NAMES = ("q", "p", "qh", "ph", "hbar", "i", "pi")


class ParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "name", or the punctuation character
    text: str
    offset: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    data = text.encode("utf-8")
    while pos < len(data):
        ch = chr(data[pos])
        if ch.isspace():
            pos += 1
        elif data[pos:pos + 3] == "−".encode("utf-8"):
            tokens.append(Token("-", "-", pos))
            pos += 3
        elif ch in "+-*^/()":
            tokens.append(Token(ch, ch, pos))
            pos += 1
        elif ch.isascii() and ch.isdigit():
            start = pos
            while pos < len(data) and chr(data[pos]).isascii() and chr(data[pos]).isdigit():
                pos += 1
            tokens.append(Token("int", data[start:pos].decode(), start))
        elif ch.isascii() and ch.isalpha():
            start = pos
            while pos < len(data) and chr(data[pos]).isascii() and chr(data[pos]).isalnum():
                pos += 1
            word = data[start:pos].decode()
            if word not in NAMES:
                raise ParseError(f"unknown symbol {word!r}", start)
            tokens.append(Token("name", word, start))
        elif ch == ".":
            raise ParseError("decimal numbers are not allowed; use a rational a/b", pos)
        else:
            raise ParseError(f"unexpected character {data[pos:pos + 1]!r}", pos)
    tokens.append(Token("end", "", len(data)))
    return tokens


@dataclass(frozen=True)
class Num:
    value: Fraction
    offset: int


@dataclass(frozen=True)
class Sym:
    name: str
    offset: int


@dataclass(frozen=True)
class Neg:
    operand: "Expr"
    offset: int


@dataclass(frozen=True)
class BinOp:
    op: str  # "+", "-", "*"
    left: "Expr"
    right: "Expr"
    offset: int


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int
    offset: int  # offset of the exponent, for error reporting


Expr = Union[Num, Sym, Neg, BinOp, Pow]


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def take(self, kind: str | None = None) -> Token:
        tok = self.tokens[self.pos]
        if kind is not None and tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {tok.text or 'end of input'!r}", tok.offset)
        self.pos += 1
        return tok

    def parse(self) -> Expr:
        if self.peek().kind == "end":
            raise ParseError("empty expression", 0)
        node = self.expr()
        tok = self.peek()
        if tok.kind == ")":
            raise ParseError("unbalanced ')'", tok.offset)
        if tok.kind == "/":
            raise ParseError("division is only allowed between integer literals", tok.offset)
        if tok.kind != "end":
            raise ParseError(f"unexpected {tok.text!r}", tok.offset)
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.peek().kind in ("+", "-"):
            tok = self.take()
            node = BinOp(tok.kind, node, self.term(), tok.offset)
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.peek().kind == "*":
            tok = self.take()
            node = BinOp("*", node, self.unary(), tok.offset)
        return node

    def unary(self) -> Expr:
        if self.peek().kind == "-":
            tok = self.take()
            return Neg(self.unary(), tok.offset)
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek().kind != "^":
            return base
        self.take("^")
        tok = self.peek()
        sign = 1
        if tok.kind == "-":
            self.take()
            sign = -1
        num = self.peek()
        if num.kind != "int":
            raise ParseError("exponent must be an integer literal", num.offset)
        self.take()
        if self.peek().kind == "/":
            raise ParseError("exponent must be an integer, not a fraction", self.peek().offset)
        return Pow(base, sign * int(num.text), tok.offset)

    def atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "int":
            self.take()
            value = Fraction(int(tok.text))
            if self.peek().kind == "/":
                slash = self.take()
                den = self.peek()
                if den.kind != "int":
                    raise ParseError("division is only allowed between integer literals", slash.offset)
                self.take()
                if int(den.text) == 0:
                    raise ParseError("zero denominator", den.offset)
                value = value / int(den.text)
            return Num(value, tok.offset)
        if tok.kind == "name":
            self.take()
            return Sym(tok.text, tok.offset)
        if tok.kind == "(":
            self.take()
            node = self.expr()
            close = self.peek()
            if close.kind != ")":
                raise ParseError("unbalanced '('", tok.offset)
            self.take()
            return node
        if tok.kind == "end":
            raise ParseError("unexpected end of input", tok.offset)
        if tok.kind == "/":
            raise ParseError("division is only allowed between integer literals", tok.offset)
        raise ParseError(f"unexpected {tok.text!r}", tok.offset)


def parse_expr(text: str) -> Expr:
    return _Parser(text).parse()


_PI = ScalarSum.of(Fraction(1, 2), twopi_pow=1)


def _evaluate(node: Expr, mode: str):
    cls = OperatorPoly if mode == OPERATOR else PhasePoly
    if isinstance(node, Num):
        return cls.constant(node.value)
    if isinstance(node, Sym):
        name = node.name
        if name == "hbar":
            return cls.constant(HBAR)
        if name == "i":
            return cls.constant(I)
        if name == "pi":
            return cls.constant(_PI)
        if mode == OPERATOR:
            if name == "qh":
                return QH
            if name == "ph":
                return PH
            raise ParseError(f"phase-space variable {name!r} in operator mode; use qh/ph", node.offset)
        if name in ("qh", "ph"):
            raise ParseError(f"operator {name!r} in phase mode; use q/p", node.offset)
        return PhasePoly.monomial(1, 0) if name == "q" else PhasePoly.monomial(0, 1)
    if isinstance(node, Neg):
        return -_evaluate(node.operand, mode)
    if isinstance(node, BinOp):
        left = _evaluate(node.left, mode)
        right = _evaluate(node.right, mode)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        return left * right
    if isinstance(node, Pow):
        base = _evaluate(node.base, mode)
        if node.exponent >= 0:
            return base**node.exponent
        if set(base.terms) != {(0, 0)} or len(base.coeff(0, 0)) != 1:
            raise ParseError("negative exponent on a non-constant or non-invertible expression", node.offset)
        return cls.constant(base.coeff(0, 0) ** node.exponent)
    raise TypeError(f"unknown node {node!r}")


def parse(text: str, mode: str = OPERATOR):
    """Parse into a canonical OperatorPoly (operator mode) or PhasePoly (phase mode)."""
    if mode not in (OPERATOR, PHASE):
        raise ValueError(f"unknown mode {mode!r}")
    return _evaluate(parse_expr(text), mode)


def render(poly, mode: str | None = None) -> str:
    """Canonical text form; re-parses to an equal polynomial."""
    if mode is not None:
        expected = OperatorPoly if mode == OPERATOR else PhasePoly
        if not isinstance(poly, expected):
            raise TypeError(f"{type(poly).__name__} cannot be rendered in {mode} mode")
    return poly.render()


def detect_mode(text: str) -> str:
    """Operator mode if the text mentions qh or ph, phase mode otherwise."""
    names = {t.text for t in tokenize(text) if t.kind == "name"}
    return OPERATOR if names & {"qh", "ph"} else PHASE
