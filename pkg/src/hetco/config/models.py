"""JSON model documents (``cpn/v1``, ``statechart/v1``, ``lts/v1``) and their serializers.

Expressions inside documents are strings in the expression grammar; JSON
numbers are read as exact rationals.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from ..kernel.errors import ExprSyntaxError, HetcoError
from ..kernel.expr import Lit, Var, parse_expr, to_source
from ..kernel.values import VarMap, as_value, value_to_json
from ..lang.cpn import UNIT, Arc, CPNAdapter, CPNModel, Place, RecordSort, Token, Transition, make_marking
from ..lang.lts import LTSAdapter, LTSModel, LTSTransition
from ..lang.statechart import After, Assign, Event, Raise, SCModel, SCTransition, StatechartAdapter
from .diagnostics import ConfigError, Diagnostic

SCHEMAS = {"cpn": "cpn/v1", "statechart": "statechart/v1", "lts": "lts/v1"}
ADAPTERS = {"cpn": CPNAdapter, "statechart": StatechartAdapter, "lts": LTSAdapter}


class _Doc:
    """Helper that turns malformed documents into SchemaError diagnostics."""

    def __init__(self, file: str | None):
        self.file = file

    def fail(self, where: str, message: str, code: str = "SchemaError"):
        raise ConfigError([Diagnostic(code, f"{where}: {message}" if where else message, self.file)])

    def get(self, obj, key, where, kind=None, default=...):
        if not isinstance(obj, dict):
            self.fail(where, "expected an object")
        if key not in obj:
            if default is ...:
                self.fail(where, f"missing field {key!r}")
            return default
        v = obj[key]
        if kind is not None and not isinstance(v, kind):
            self.fail(f"{where}.{key}", f"expected {getattr(kind, '__name__', kind)}")
        return v

    def expr(self, src, where):
        if isinstance(src, bool) or isinstance(src, (int, Fraction)):
            return Lit(as_value(src))
        if not isinstance(src, str):
            self.fail(where, "expected an expression string")
        try:
            return parse_expr(src)
        except ExprSyntaxError as exc:
            self.fail(where, str(exc), "ExprSyntaxError")


def load_json(path: str | Path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError([Diagnostic("FileError", f"cannot read file: {exc.strerror}", str(path))]) from None
    return _decode(text, str(path))


def _decode(text: str, file: str | None):
    try:
        return json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise ConfigError([Diagnostic("SyntaxError", exc.msg, file, exc.lineno, exc.colno)]) from None


def _check_schema(doc: _Doc, data, expected: str):
    schema = doc.get(data, "schema", "", str)
    if schema != expected:
        doc.fail("schema", f"expected {expected!r}, found {schema!r}")


def _sort(doc: _Doc, s, where):
    if s == "UNIT":
        return UNIT
    if s in ("NUM", "BOOL", "STR"):
        return s
    if isinstance(s, dict):
        try:
            return RecordSort(tuple(s.items()))
        except ValueError as exc:
            doc.fail(where, str(exc))
    doc.fail(where, f"unknown colour sort {s!r}")


def _sort_json(s):
    if s == UNIT:
        return "UNIT"
    if isinstance(s, RecordSort):
        return dict(s.fields)
    return s


def token_from_json(entry, sort, where="token", file=None) -> Token:
    """``25``, ``{"value": 25, "time": 0}``, or for records ``{"value": {...}}``."""
    doc = _Doc(file)
    if isinstance(entry, dict) and "value" in entry and (set(entry) <= {"value", "time"}):
        raw, time = entry["value"], entry.get("time", 0)
    else:
        raw, time = entry, 0
    if isinstance(sort, RecordSort):
        if not isinstance(raw, dict):
            doc.fail(where, "record tokens need an object value")
        value = VarMap({k: as_value(v) for k, v in raw.items()})
    elif sort == "NUM" and isinstance(raw, str):
        try:
            value = Fraction(raw)
        except ValueError:
            doc.fail(where, f"bad number {raw!r}")
    else:
        try:
            value = as_value(raw)
        except TypeError as exc:
            doc.fail(where, str(exc))
    try:
        t = Fraction(time) if not isinstance(time, bool) else None
    except (TypeError, ValueError):
        t = None
    if t is None or t < 0:
        doc.fail(where, "token timestamps must be non-negative numbers")
    return Token(value, t)


def token_to_json(tok: Token):
    return {"value": value_to_json(tok.value), "time": value_to_json(tok.time)}


def cpn_from_json(data, file: str | None = None) -> CPNModel:
    doc = _Doc(file)
    _check_schema(doc, data, SCHEMAS["cpn"])
    name = doc.get(data, "name", "", str)
    places = []
    for k, pd in enumerate(doc.get(data, "places", "", list)):
        w = f"places[{k}]"
        places.append(Place(
            doc.get(pd, "name", w, str),
            _sort(doc, doc.get(pd, "sort", w, default="NUM"), f"{w}.sort"),
            doc.get(pd, "port", w, str, default="none"),
            doc.get(pd, "channel", w, str, default=None),
        ))
    sorts = {p.name: p.sort for p in places}
    transitions = []
    for k, td in enumerate(doc.get(data, "transitions", "", list)):
        w = f"transitions[{k}]"
        transitions.append(Transition(
            doc.get(td, "name", w, str),
            doc.expr(doc.get(td, "guard", w, default="true"), f"{w}.guard"),
            doc.expr(doc.get(td, "delay", w, default="0"), f"{w}.delay"),
        ))
    tnames = {t.name for t in transitions}
    clash = set(sorts) & tnames
    if clash:
        doc.fail("", f"names used for both a place and a transition: {sorted(clash)}")
    arcs = []
    for k, ad in enumerate(doc.get(data, "arcs", "", list)):
        w = f"arcs[{k}]"
        src, dst = doc.get(ad, "from", w, str), doc.get(ad, "to", w, str)
        if src in sorts and dst in tnames:
            place, trans, direction = src, dst, "in"
        elif src in tnames and dst in sorts:
            place, trans, direction = dst, src, "out"
        else:
            doc.fail(w, f"arc must connect a place and a transition, got {src!r} -> {dst!r}")
        raw = doc.get(ad, "inscription", w, default=None)
        if raw is None:
            ins = None if direction == "out" else Var("_")
        elif isinstance(raw, dict):
            ins = {f: doc.expr(e, f"{w}.inscription.{f}") for f, e in raw.items()}
        else:
            ins = doc.expr(raw, f"{w}.inscription")
        delay = doc.get(ad, "delay", w, default=None)
        arcs.append(Arc(place, trans, direction, ins, None if delay is None else doc.expr(delay, f"{w}.delay")))
    marking = {}
    for place, toks in (doc.get(data, "marking", "", dict, default={}) or {}).items():
        if place not in sorts:
            doc.fail("marking", f"unknown place {place!r}")
        marking[place] = [token_from_json(t, sorts[place], f"marking.{place}", file) for t in toks]
    try:
        return CPNModel(name, tuple(places), tuple(transitions), tuple(arcs), make_marking(marking))
    except (HetcoError, ValueError) as exc:
        raise ConfigError([Diagnostic("ModelError", str(exc), file)]) from None


def cpn_to_json(m: CPNModel) -> dict:
    places = []
    for p in m.places:
        d = {"name": p.name, "sort": _sort_json(p.sort)}
        if p.port != "none":
            d["port"] = p.port
            d["channel"] = p.channel
        places.append(d)
    arcs = []
    for a in m.arcs:
        d = {"from": a.place, "to": a.transition} if a.direction == "in" else {"from": a.transition, "to": a.place}
        if isinstance(a.inscription, dict):
            d["inscription"] = {f: to_source(e) for f, e in a.inscription.items()}
        elif a.inscription is not None:
            d["inscription"] = to_source(a.inscription)
        if a.delay is not None:
            d["delay"] = to_source(a.delay)
        arcs.append(d)
    out = {
        "schema": SCHEMAS["cpn"],
        "name": m.name,
        "places": places,
        "transitions": [{"name": t.name, "guard": to_source(t.guard), "delay": to_source(t.delay)} for t in m.transitions],
        "arcs": arcs,
    }
    if m.initial:
        out["marking"] = {p: [token_to_json(t) for t in ts] for p, ts in m.initial}
    return out


def _pool_event(doc: _Doc, s, where):
    if not isinstance(s, str) or "." not in s:
        doc.fail(where, "expected 'pool.event'")
    pool, _, name = s.partition(".")
    return pool, name


def statechart_from_json(data, file: str | None = None) -> SCModel:
    doc = _Doc(file)
    _check_schema(doc, data, SCHEMAS["statechart"])
    name = doc.get(data, "name", "", str)
    states = doc.get(data, "states", "", list)
    initial = doc.get(data, "initial", "", str)
    vars_ = []
    for k, vd in enumerate(doc.get(data, "vars", "", list, default=[])):
        w = f"vars[{k}]"
        vars_.append((doc.get(vd, "name", w, str), doc.expr(doc.get(vd, "init", w), f"{w}.init")))
    pools = []
    for k, pd in enumerate(doc.get(data, "pools", "", list, default=[])):
        w = f"pools[{k}]"
        pools.append((doc.get(pd, "name", w, str), doc.get(pd, "dir", w, str)))
    transitions = []
    for k, td in enumerate(doc.get(data, "transitions", "", list)):
        w = f"transitions[{k}]"
        trig = doc.get(td, "trigger", w, default=None)
        if trig is None:
            trigger = None
        elif isinstance(trig, dict) and "event" in trig:
            trigger = Event(*_pool_event(doc, trig["event"], f"{w}.trigger.event"))
        elif isinstance(trig, dict) and "after" in trig:
            trigger = After(doc.expr(trig["after"], f"{w}.trigger.after"))
        else:
            doc.fail(f"{w}.trigger", "expected {\"event\": \"pool.name\"} or {\"after\": expr}")
        effects = []
        for j, ed in enumerate(doc.get(td, "effects", w, list, default=[])):
            we = f"{w}.effects[{j}]"
            if isinstance(ed, dict) and "assign" in ed:
                effects.append(Assign(doc.get(ed, "assign", we, str), doc.expr(doc.get(ed, "expr", we), f"{we}.expr")))
            elif isinstance(ed, dict) and "raise" in ed:
                pool, ev = _pool_event(doc, ed["raise"], f"{we}.raise")
                payload = doc.get(ed, "payload", we, dict, default={})
                effects.append(Raise(pool, ev, tuple((key, doc.expr(e, f"{we}.payload.{key}")) for key, e in payload.items())))
            else:
                doc.fail(we, "expected an 'assign' or 'raise' effect")
        transitions.append(SCTransition(
            doc.get(td, "from", w, str),
            doc.get(td, "to", w, str),
            trigger,
            doc.expr(doc.get(td, "guard", w, default="true"), f"{w}.guard"),
            tuple(effects),
        ))
    try:
        return SCModel(name, tuple(states), initial, tuple(vars_), tuple(pools), tuple(transitions))
    except HetcoError as exc:
        raise ConfigError([Diagnostic("ModelError", str(exc), file)]) from None


def statechart_to_json(m: SCModel) -> dict:
    ts = []
    for t in m.transitions:
        d = {"from": t.source, "to": t.target}
        if isinstance(t.trigger, Event):
            d["trigger"] = {"event": str(t.trigger)}
        elif isinstance(t.trigger, After):
            d["trigger"] = {"after": to_source(t.trigger.duration)}
        if t.guard != Lit(True):
            d["guard"] = to_source(t.guard)
        effects = []
        for e in t.effects:
            if isinstance(e, Assign):
                effects.append({"assign": e.var, "expr": to_source(e.expr)})
            else:
                r = {"raise": f"{e.pool}.{e.event}"}
                if e.payload:
                    r["payload"] = {k: to_source(x) for k, x in e.payload}
                effects.append(r)
        if effects:
            d["effects"] = effects
        ts.append(d)
    return {
        "schema": SCHEMAS["statechart"],
        "name": m.name,
        "states": list(m.states),
        "initial": m.initial,
        "vars": [{"name": n, "init": to_source(e)} for n, e in m.vars],
        "pools": [{"name": n, "dir": d} for n, d in m.pools],
        "transitions": ts,
    }


def lts_from_json(data, file: str | None = None) -> LTSModel:
    doc = _Doc(file)
    _check_schema(doc, data, SCHEMAS["lts"])
    chans = []
    for k, cd in enumerate(doc.get(data, "channels", "", list, default=[])):
        w = f"channels[{k}]"
        chans.append((doc.get(cd, "name", w, str), doc.get(cd, "dir", w, str)))
    ts = []
    for k, td in enumerate(doc.get(data, "transitions", "", list)):
        w = f"transitions[{k}]"
        src, dst = doc.get(td, "from", w, str), doc.get(td, "to", w, str)
        kinds = [x for x in ("tau", "emit", "receive") if x in td]
        if len(kinds) != 1:
            doc.fail(w, "exactly one of 'tau', 'emit', 'receive' is required")
        kind = kinds[0]
        if kind == "tau":
            ts.append(LTSTransition(src, dst, "tau", doc.get(td, "tau", w, str)))
        else:
            chan, ev = _pool_event(doc, td[kind], f"{w}.{kind}")
            ts.append(LTSTransition(src, dst, kind, ev, chan))
    try:
        return LTSModel(
            doc.get(data, "name", "", str),
            tuple(doc.get(data, "states", "", list)),
            doc.get(data, "initial", "", str),
            tuple(chans),
            tuple(ts),
        )
    except HetcoError as exc:
        raise ConfigError([Diagnostic("ModelError", str(exc), file)]) from None


def lts_to_json(m: LTSModel) -> dict:
    ts = []
    for t in m.transitions:
        d = {"from": t.source, "to": t.target}
        d[t.kind] = t.label if t.kind == "tau" else f"{t.channel}.{t.label}"
        ts.append(d)
    return {
        "schema": SCHEMAS["lts"],
        "name": m.name,
        "states": list(m.states),
        "initial": m.initial,
        "channels": [{"name": n, "dir": d} for n, d in m.channels],
        "transitions": ts,
    }


LOADERS = {"cpn": cpn_from_json, "statechart": statechart_from_json, "lts": lts_from_json}
DUMPERS = {"cpn": cpn_to_json, "statechart": statechart_to_json, "lts": lts_to_json}


def load_model(language: str, path: str | Path):
    data = load_json(path)
    return LOADERS[language](data, str(path))


def serialize_model(language: str, model) -> str:
    return json.dumps(DUMPERS[language](model), indent=2, ensure_ascii=False, default=value_to_json) + "\n"


def parse_model(language: str, text: str, file: str | None = None):
    return LOADERS[language](_decode(text, file), file)
