"""Element expressions: integers, ``x(i,k)``, ``y(i,k)``, ``+ - * ^`` and parentheses.

Precedence from tightest: ``^`` (exponent must be an integer literal), unary
``-``, ``*``, then binary ``+``/``-`` (left associative).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

from .model import RingElement, TowerError
from .tower import Tower


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Gen:
    kind: str
    i: int
    k: int

    def __str__(self) -> str:
        return f"{self.kind}({self.i},{self.k})"


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Sub:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Mul:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exp: int


Expr = Union[Num, Gen, Neg, Add, Sub, Mul, Pow]

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<gen>[xy])\b|(?P<op>[-+*^(),]))")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while True:
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                rest = text[pos:]
                if rest.strip():
                    bad = pos + len(rest) - len(rest.lstrip())
                    raise ExprSyntaxError(f"unexpected character {text[bad]!r}", bad)
                break
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.end = len(text)
        self.i = 0

    def peek(self) -> Optional[tuple[str, str, int]]:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def offset(self) -> int:
        tok = self.peek()
        return tok[2] if tok else self.end

    def take(self, value: Optional[str] = None, kind: Optional[str] = None) -> tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            want = repr(value) if value else (kind or "a token")
            raise ExprSyntaxError(f"expected {want} but input ended", self.end)
        if (value is not None and tok[1] != value) or (kind is not None and tok[0] != kind):
            want = repr(value) if value else kind
            raise ExprSyntaxError(f"expected {want}, found {tok[1]!r}", tok[2])
        self.i += 1
        return tok

    def parse(self) -> Expr:
        if not self.tokens:
            raise ExprSyntaxError("empty expression", 0)
        node = self.sum()
        if self.peek() is not None:
            tok = self.peek()
            raise ExprSyntaxError(f"unexpected {tok[1]!r}", tok[2])
        return node

    def sum(self) -> Expr:
        node = self.product()
        while (tok := self.peek()) is not None and tok[1] in "+-" and tok[0] == "op":
            self.i += 1
            rhs = self.product()
            node = Add(node, rhs) if tok[1] == "+" else Sub(node, rhs)
        return node

    def product(self) -> Expr:
        node = self.unary()
        while (tok := self.peek()) is not None and tok[1] == "*":
            self.i += 1
            node = Mul(node, self.unary())
        return node

    def unary(self) -> Expr:
        tok = self.peek()
        if tok is not None and tok[1] == "-":
            self.i += 1
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        node = self.atom()
        tok = self.peek()
        if tok is not None and tok[1] == "^":
            self.i += 1
            exp = self.take(kind="int")
            node = Pow(node, int(exp[1]))
        return node

    def atom(self) -> Expr:
        tok = self.peek()
        if tok is None:
            raise ExprSyntaxError("expected an operand but input ended", self.end)
        kind, value, _ = tok
        if kind == "int":
            self.i += 1
            return Num(int(value))
        if kind == "gen":
            self.i += 1
            self.take("(")
            i = int(self.take(kind="int")[1])
            self.take(",")
            k = int(self.take(kind="int")[1])
            self.take(")")
            return Gen(value, i, k)
        if value == "(":
            self.i += 1
            node = self.sum()
            self.take(")")
            return node
        raise ExprSyntaxError(f"expected an operand, found {value!r}", tok[2])


def parse_expr(text: str) -> Expr:
    return _Parser(text).parse()


def generators_of(expr: Expr) -> set:
    if isinstance(expr, Gen):
        return {(expr.kind, expr.i, expr.k)}
    if isinstance(expr, Num):
        return set()
    if isinstance(expr, (Neg,)):
        return generators_of(expr.arg)
    if isinstance(expr, Pow):
        return generators_of(expr.base)
    return generators_of(expr.left) | generators_of(expr.right)


def eval_expr(tower: Tower, expr: Union[Expr, str], level: Optional[int] = None) -> RingElement:
    """Evaluate at ``level`` (default: top); generators are lifted from their birth level."""
    if isinstance(expr, str):
        expr = parse_expr(expr)
    level = tower.top if level is None else level
    for kind, i, k in sorted(generators_of(expr)):
        if (i, k) not in tower.generators:
            raise TowerError(f"unknown generator {kind}({i},{k})")
        birth = tower.generators[(i, k)][0].level
        if birth > level:
            raise TowerError(f"{kind}({i},{k}) does not exist at level {level}")

    def ev(node: Expr) -> RingElement:
        if isinstance(node, Num):
            return tower.int_const(level, node.value)
        if isinstance(node, Gen):
            return tower.generator(node.kind, node.i, node.k, level)
        if isinstance(node, Neg):
            return tower.neg(ev(node.arg))
        if isinstance(node, Pow):
            return tower.power(ev(node.base), node.exp)
        a, b = ev(node.left), ev(node.right)
        if isinstance(node, Add):
            return tower.add(a, b)
        if isinstance(node, Sub):
            return tower.sub(a, b)
        return tower.mul(a, b)

    return ev(expr)
