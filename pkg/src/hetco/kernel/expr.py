"""Expression language shared by net inscriptions and statechart guards/effects.

Grammar (lowest to highest precedence)::

    expr    := or
    or      := and ('||' and)*
    and     := eq ('&&' eq)*
    eq      := rel (('==' | '!=') rel)*
    rel     := add (('<' | '<=' | '>' | '>=') add)*
    add     := mul (('+' | '-') mul)*
    mul     := unary (('*' | '/') unary)*
    unary   := ('-' | '!') unary | primary
    primary := NUMBER | STRING | 'true' | 'false' | IDENT
             | ('min' | 'max') '(' expr ',' expr ')' | '(' expr ')'

Numbers are read exactly (``0.5`` is 1/2).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

from .errors import DivisionByZero, ExprSyntaxError, TypeMismatch, UnboundVariable
from .values import Value, as_value, format_value, kind_of


@dataclass(frozen=True)
class Lit:
    value: Value

    def __repr__(self):
        return f"Lit({self.value!r})"


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str
    arg: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    fn: str
    args: tuple


Expr = Union[Lit, Var, Unary, Binary, Call]

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:\.\d+)?)
  | (?P<str>"(?:[^"\\]|\\.)*")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>\|\||&&|==|!=|<=|>=|[<>+\-*/!(),])
    """,
    re.VERBOSE,
)

_BINARY_LEVELS = [
    ("||",),
    ("&&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("+", "-"),
    ("*", "/"),
]


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        tok = self.next()
        if tok[1] != value or tok[0] not in ("op", "ident"):
            raise ExprSyntaxError(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok[2], self.text)
        return tok

    def parse(self) -> Expr:
        e = self.binary(0)
        tok = self.peek()
        if tok[0] != "eof":
            raise ExprSyntaxError(f"unexpected {tok[1]!r}", tok[2], self.text)
        return e

    def binary(self, level: int) -> Expr:
        if level == len(_BINARY_LEVELS):
            return self.unary()
        left = self.binary(level + 1)
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in _BINARY_LEVELS[level]:
                self.next()
                left = Binary(val, left, self.binary(level + 1))
            else:
                return left

    def unary(self) -> Expr:
        kind, val, _ = self.peek()
        if kind == "op" and val in ("-", "!"):
            self.next()
            arg = self.unary()
            if val == "-" and isinstance(arg, Lit) and isinstance(arg.value, Fraction):
                return Lit(-arg.value)
            return Unary(val, arg)
        return self.primary()

    def primary(self) -> Expr:
        kind, val, pos = self.next()
        if kind == "num":
            return Lit(Fraction(val))
        if kind == "str":
            return Lit(json.loads(val))
        if kind == "ident":
            if val == "true":
                return Lit(True)
            if val == "false":
                return Lit(False)
            if val in ("min", "max") and self.peek()[1] == "(":
                self.next()
                a = self.binary(0)
                self.expect(",")
                b = self.binary(0)
                self.expect(")")
                return Call(val, (a, b))
            return Var(val)
        if kind == "op" and val == "(":
            e = self.binary(0)
            self.expect(")")
            return e
        raise ExprSyntaxError(f"unexpected {val or 'end of input'!r}", pos, self.text)


def parse_expr(text: str) -> Expr:
    return _Parser(text).parse()


def free_vars(e: Expr) -> frozenset[str]:
    if isinstance(e, Var):
        return frozenset([e.name])
    if isinstance(e, Lit):
        return frozenset()
    if isinstance(e, Unary):
        return free_vars(e.arg)
    if isinstance(e, Binary):
        return free_vars(e.left) | free_vars(e.right)
    return frozenset().union(*(free_vars(a) for a in e.args))


def to_source(e: Expr) -> str:
    """Render back to parseable text (fully parenthesised binaries)."""
    if isinstance(e, Lit):
        v = e.value
        if isinstance(v, Fraction):
            return _num_source(v)
        return format_value(v)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Unary):
        return f"{e.op}{to_source(e.arg)}" if not isinstance(e.arg, Binary) else f"{e.op}({to_source(e.arg)})"
    if isinstance(e, Binary):
        return f"({to_source(e.left)} {e.op} {to_source(e.right)})"
    return f"{e.fn}({', '.join(to_source(a) for a in e.args)})"


def _num_source(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v)
    d = v.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"({v.numerator} / {v.denominator})"
    places = max(twos, fives)
    scaled = abs(v.numerator) * (10**places // v.denominator)
    digits = str(scaled).rjust(places + 1, "0")
    sign = "-" if v < 0 else ""
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


def _num(v, op):
    if not isinstance(v, Fraction):
        raise TypeMismatch(f"operator {op!r} expects a number, got {kind_of(v).lower()} {format_value(v)}")
    return v


def _bool(v, op):
    if not isinstance(v, bool):
        raise TypeMismatch(f"operator {op!r} expects a boolean, got {kind_of(v).lower()} {format_value(v)}")
    return v


def eval_expr(e: Expr, env: Mapping[str, Value]):
    if isinstance(e, Lit):
        return e.value
    if isinstance(e, Var):
        try:
            return env[e.name]
        except KeyError:
            raise UnboundVariable(e.name) from None
    if isinstance(e, Unary):
        v = eval_expr(e.arg, env)
        if e.op == "-":
            return -_num(v, "-")
        return not _bool(v, "!")
    if isinstance(e, Binary):
        op = e.op
        if op == "&&":
            return _bool(eval_expr(e.left, env), op) and _bool(eval_expr(e.right, env), op)
        if op == "||":
            return _bool(eval_expr(e.left, env), op) or _bool(eval_expr(e.right, env), op)
        a = eval_expr(e.left, env)
        b = eval_expr(e.right, env)
        if op in ("==", "!="):
            if kind_of(a) != kind_of(b):
                raise TypeMismatch(f"cannot compare {kind_of(a).lower()} with {kind_of(b).lower()}")
            return (a == b) == (op == "==")
        if op in ("<", "<=", ">", ">="):
            if not (isinstance(a, Fraction) and isinstance(b, Fraction)) and not (
                isinstance(a, str) and isinstance(b, str)
            ):
                raise TypeMismatch(f"cannot order {kind_of(a).lower()} and {kind_of(b).lower()}")
            return {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[op]
        a, b = _num(a, op), _num(b, op)
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if b == 0:
            raise DivisionByZero()
        return a / b
    a, b = (_num(eval_expr(x, env), e.fn) for x in e.args)
    return min(a, b) if e.fn == "min" else max(a, b)


def expr(text_or_value) -> Expr:
    """Build an Expr from source text, or wrap a non-string literal."""
    if isinstance(text_or_value, str):
        return parse_expr(text_or_value)
    return Lit(as_value(text_or_value))
