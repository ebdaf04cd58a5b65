"""The bindings language: one ``source -> target`` channel wiring per line.

::

    sensor.TrainInbound -> manager.sensors with { key: value -> trainSpeed, event := trainInbound }
    manager.traffic -> barrier.commands with { event: blockCarTraffic -> closeBarrier }

Channel and event names are identifiers or double-quoted strings. ``#``
starts a comment.
"""

from __future__ import annotations

import json
import re

from ..kernel.broker import BindingSpec, ChannelRef, EventRename, EventSet, KeyRename
from .diagnostics import ConfigError, Diagnostic
from .lexer import LineParser, strip_comment


def _ref(p: LineParser) -> ChannelRef:
    inst = p.ident("instance name")
    p.expect(".")
    chan = p.ident("channel name")
    return ChannelRef(inst, chan)


def _rule(p: LineParser):
    col = p.peek().col
    kind = p.ident("'key' or 'event'", allow_string=False)
    if kind == "key":
        p.expect(":")
        old = p.ident("key name")
        p.expect("->")
        return KeyRename(old, p.ident("key name"))
    if kind == "event":
        if p.accept(":="):
            return EventSet(p.ident("event name"))
        p.expect(":")
        old = p.ident("event name")
        p.expect("->")
        return EventRename(old, p.ident("event name"))
    p.fail(f"unknown transform rule {kind!r}", col)


def parse_binding_line(text: str, line: int = 1, file: str | None = None) -> BindingSpec:
    p = LineParser(text, line, file)
    source = _ref(p)
    p.expect("->")
    target = _ref(p)
    rules = []
    if p.accept("with"):
        p.expect("{")
        if not p.at("}"):
            rules.append(_rule(p))
            while p.accept(","):
                rules.append(_rule(p))
        p.expect("}")
    p.end()
    return BindingSpec(source, target, tuple(rules), line=line)


def parse_bindings(text: str, file: str | None = None) -> list[BindingSpec]:
    """Parse a whole bindings document; all syntax errors are reported together."""
    out, diags = [], []
    first_line = {}
    for n, raw in enumerate(text.splitlines(), start=1):
        line = strip_comment(raw)
        if not line.strip():
            continue
        try:
            b = parse_binding_line(line, n, file)
        except ConfigError as exc:
            diags.extend(exc.diagnostics)
            continue
        if b.source in first_line:
            diags.append(Diagnostic(
                "DuplicateSource",
                f"channel {b.source} is already bound on line {first_line[b.source]} (one binding per source channel)",
                file, n, 1,
            ))
            continue
        first_line[b.source] = n
        out.append(b)
    if diags:
        raise ConfigError(diags)
    return out


_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _name(s: str) -> str:
    return s if _IDENT.match(s) and s not in ("with", "key", "event") else json.dumps(s, ensure_ascii=False)


def serialize_binding(b: BindingSpec) -> str:
    s = f"{_name(b.source.instance)}.{_name(b.source.channel)} -> {_name(b.target.instance)}.{_name(b.target.channel)}"
    if not b.transform:
        return s
    rules = []
    for r in b.transform:
        if isinstance(r, KeyRename):
            rules.append(f"key: {_name(r.old)} -> {_name(r.new)}")
        elif isinstance(r, EventRename):
            rules.append(f"event: {_name(r.old)} -> {_name(r.new)}")
        else:
            rules.append(f"event := {_name(r.name)}")
    return s + " with { " + ", ".join(rules) + " }"


def serialize_bindings(bindings) -> str:
    return "".join(serialize_binding(b) + "\n" for b in bindings)
