"""The property language: named atomic propositions and named LTL checks.

::

    prop Barriers-open := in(barrier, "Barrier open")
    prop Train-passing := tokens(sensor, "Train passed") >= 1
    prop Busy          := var(manager, trains) > 0
    check safety : G !(Barriers-open && Train-passing)

Formula precedence, tightest first: ``! X F G`` (also ``[]`` and ``<>``),
then ``U R`` (right associative), ``&&``, ``||``, ``->`` (right associative).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..kernel.adapter import CMP_OPS, AtomQuery, InState, TokenCount, VarCmp
from ..kernel.values import format_value
from ..verify.ltl import (
    FALSE, TRUE, Always, And, Eventually, Formula, Implies, Next, Not, Or, Prop, Release, Until, atoms,
)
from .diagnostics import ConfigError, Diagnostic
from .lexer import LineParser, strip_comment

KEYWORDS = {"G", "F", "X", "U", "R", "true", "false", "prop", "check"}
_UNARY = {"!": Not, "X": Next, "F": Eventually, "G": Always, "[]": Always, "<>": Eventually}


@dataclass
class PropertyFile:
    propositions: dict = field(default_factory=dict)  # name -> AtomQuery, in declaration order
    checks: list = field(default_factory=list)  # [(name, Formula)]
    lines: dict = field(default_factory=dict, compare=False, repr=False)  # name -> source line

    def check(self, name: str) -> Formula:
        for n, f in self.checks:
            if n == name:
                return f
        raise KeyError(name)


def _cmp(p: LineParser) -> str:
    tok = p.peek()
    if tok.kind == "op" and tok.text in CMP_OPS:
        p.next()
        return tok.text
    p.fail(f"expected a comparison operator, found {tok.text or 'end of line'!r}")


def _literal(p: LineParser):
    tok = p.next()
    if tok.kind == "number":
        return Fraction(tok.text)
    if tok.kind == "string":
        return tok.value
    if tok.kind == "name" and tok.text in ("true", "false"):
        return tok.text == "true"
    p.fail(f"expected a literal, found {tok.text or 'end of line'!r}", tok.col)


def parse_atom(p: LineParser) -> AtomQuery:
    col = p.peek().col
    kind = p.ident("'in', 'tokens' or 'var'", allow_string=False)
    p.expect("(")
    inst = p.ident("instance name")
    p.expect(",")
    what = p.ident("state, place or variable name")
    p.expect(")")
    if kind == "in":
        return InState(inst, what)
    if kind == "tokens":
        op = _cmp(p)
        tok = p.next()
        if tok.kind != "number" or not tok.text.lstrip("-").isdigit():
            p.fail("token counts compare against an integer", tok.col)
        return TokenCount(inst, what, op, int(tok.text))
    if kind == "var":
        op = _cmp(p)
        return VarCmp(inst, what, op, _literal(p))
    p.fail(f"unknown atom kind {kind!r}", col)


class _FormulaParser:
    def __init__(self, p: LineParser, inline_atoms: bool = False):
        self.p = p
        self.inline_atoms = inline_atoms
        self.inline: dict = {}

    def parse(self) -> Formula:
        return self.implies()

    def implies(self):
        left = self.disj()
        if self.p.accept("->"):
            return Implies(left, self.implies())
        return left

    def disj(self):
        left = self.conj()
        while self.p.accept("||"):
            left = Or(left, self.conj())
        return left

    def conj(self):
        left = self.binary_temporal()
        while self.p.accept("&&"):
            left = And(left, self.binary_temporal())
        return left

    def binary_temporal(self):
        left = self.unary()
        tok = self.p.peek()
        if tok.kind == "name" and tok.text in ("U", "R"):
            self.p.next()
            right = self.binary_temporal()
            return Until(left, right) if tok.text == "U" else Release(left, right)
        return left

    def unary(self):
        tok = self.p.peek()
        if tok.text in _UNARY and tok.kind in ("op", "name"):
            self.p.next()
            return _UNARY[tok.text](self.unary())
        return self.primary()

    def primary(self):
        p = self.p
        tok = p.peek()
        if p.accept("("):
            f = self.parse()
            p.expect(")")
            return f
        if tok.kind == "name":
            if tok.text == "true":
                p.next()
                return TRUE
            if tok.text == "false":
                p.next()
                return FALSE
            if tok.text in KEYWORDS:
                p.fail(f"unexpected keyword {tok.text!r}")
            if self.inline_atoms and tok.text in ("in", "tokens", "var") and p.peek(1).text == "(":
                q = parse_atom(p)
                name = _atom_name(q)
                self.inline[name] = q
                return Prop(name)
            p.next()
            return Prop(tok.text)
        p.fail(f"expected a formula, found {tok.text or 'end of line'!r}")


def _atom_name(q: AtomQuery) -> str:
    return format_atom(q)


def format_atom(q: AtomQuery) -> str:
    if isinstance(q, InState):
        return f'in({q.instance}, {format_value(q.state)})'
    if isinstance(q, TokenCount):
        return f'tokens({q.instance}, {format_value(q.place)}) {q.cmp} {q.n}'
    return f'var({q.instance}, {q.var}) {q.cmp} {format_value(q.value)}'


def parse_ltl(text: str, line: int = 1, file: str | None = None) -> Formula:
    p = LineParser(text, line, file)
    f = _FormulaParser(p).parse()
    p.end()
    return f


def parse_goal(text: str) -> tuple[Formula, dict]:
    """Parse a formula whose atoms may be written inline, e.g. ``in(barrier, "Barrier closed")``.

    Returns the formula and the propositions it introduced.
    """
    p = LineParser(text, 1, None)
    fp = _FormulaParser(p, inline_atoms=True)
    f = fp.parse()
    p.end()
    return f, fp.inline


def parse_properties(text: str, file: str | None = None) -> PropertyFile:
    pf = PropertyFile()
    diags = []
    pending = []
    for n, raw in enumerate(text.splitlines(), start=1):
        line = strip_comment(raw)
        if not line.strip():
            continue
        p = LineParser(line, n, file)
        try:
            head = p.ident("'prop' or 'check'", allow_string=False)
            if head == "prop":
                name = p.ident("proposition name", allow_string=False)
                if name in KEYWORDS:
                    p.fail(f"{name!r} is reserved")
                p.expect(":=")
                atom = parse_atom(p)
                p.end()
                if name in pf.propositions:
                    diags.append(Diagnostic("DuplicateProposition", f"proposition {name!r} declared twice", file, n, 1))
                pf.propositions[name] = atom
                pf.lines[name] = n
            elif head == "check":
                name = p.ident("check name")
                p.expect(":")
                f = _FormulaParser(p).parse()
                p.end()
                if any(c == name for c, _ in pf.checks):
                    diags.append(Diagnostic("DuplicateCheck", f"check {name!r} declared twice", file, n, 1))
                pf.checks.append((name, f))
                pf.lines[name] = n
                pending.append((name, f, n))
            else:
                p.fail(f"expected 'prop' or 'check', found {head!r}", 1)
        except ConfigError as exc:
            diags.extend(exc.diagnostics)
    for name, f, n in pending:
        for a in sorted(atoms(f) - set(pf.propositions)):
            diags.append(Diagnostic("UnknownProposition", f"check {name!r} uses undeclared proposition {a!r}", file, n))
    if diags:
        raise ConfigError(diags)
    return pf


def serialize_properties(pf: PropertyFile) -> str:
    out = [f"prop {name} := {format_atom(q)}" for name, q in pf.propositions.items()]
    out += [f"check {name} : {f}" for name, f in pf.checks]
    return "".join(s + "\n" for s in out)
