"""Small line-oriented tokenizer shared by the bindings and property languages."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .diagnostics import ConfigError, Diagnostic


@dataclass(frozen=True)
class Tok:
    kind: str  # name | string | number | op | eof
    text: str
    col: int  # 1-based

    @property
    def value(self):
        return json.loads(self.text) if self.kind == "string" else self.text


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<number>-?\d+(?:\.\d+)?(?:/\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*(?:-[A-Za-z0-9_]+)*)
  | (?P<op>:=|->|<->|&&|\|\||\[\]|<>|==|!=|<=|>=|[<>=!(){},.:])
    """,
    re.VERBOSE,
)


class LineParser:
    """Cursor over the tokens of one source line, raising positioned diagnostics."""

    def __init__(self, text: str, line: int, file: str | None = None):
        self.text = text
        self.line = line
        self.file = file
        self.toks = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                self.fail(f"unexpected character {text[pos]!r}", pos + 1)
            if m.lastgroup != "ws":
                self.toks.append(Tok(m.lastgroup, m.group(), pos + 1))
            pos = m.end()
        self.toks.append(Tok("eof", "", len(text) + 1))
        self.i = 0

    def fail(self, message: str, col: int | None = None, code: str = "SyntaxError"):
        if col is None:
            col = self.peek().col
        raise ConfigError([Diagnostic(code, message, self.file, self.line, col)])

    def peek(self, k: int = 0) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Tok:
        tok = self.peek()
        self.i += 1
        return tok

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind in ("op", "name") and tok.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Tok:
        if not self.at(text):
            tok = self.peek()
            self.fail(f"expected {text!r}, found {tok.text or 'end of line'!r}")
        return self.next()

    def ident(self, what: str = "name", allow_string: bool = True) -> str:
        tok = self.peek()
        if tok.kind == "name" or (allow_string and tok.kind == "string"):
            self.i += 1
            return tok.value
        self.fail(f"expected {what}, found {tok.text or 'end of line'!r}")

    def end(self):
        tok = self.peek()
        if tok.kind != "eof":
            self.fail(f"unexpected {tok.text!r}")


def strip_comment(line: str) -> str:
    """Drop a ``#`` comment that is not inside a string literal."""
    in_str = False
    esc = False
    for i, ch in enumerate(line):
        if in_str:
            if esc:
                esc = False
            elif ch == "\\":
                esc = True
            elif ch == '"':
                in_str = False
        elif ch == '"':
            in_str = True
        elif ch == "#":
            return line[:i]
    return line
