"""Timed coloured Petri nets with port places as channels.

Every token carries an absolute timestamp and is available once the global
clock has reached it. Arc patterns on input arcs are a single variable or a
literal; output inscriptions are expressions over the bound variables. The
timestamp of a produced token is ``now + transition delay + arc delay``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, NamedTuple, Union

from ..kernel.adapter import INFINITY, ActionLabel, Adapter, TokenCount, compare, params_of
from ..kernel.errors import EvalError, with_context, HetcoError, MissingKey, NegativeDelay, NotEnabled, TypeMismatch
from ..kernel.expr import Expr, Lit, Var, eval_expr, free_vars
from ..kernel.values import EMPTY, VarMap, as_value, format_value, kind_of, same_value, value_key

SCALAR_SORTS = ("NUM", "BOOL", "STR")


@dataclass(frozen=True)
class RecordSort:
    fields: tuple  # ((name, scalar sort), ...)

    def __post_init__(self):
        names = [n for n, _ in self.fields]
        if len(set(names)) != len(names):
            raise ValueError("record field names must be unique")
        for _, s in self.fields:
            if s not in SCALAR_SORTS:
                raise ValueError(f"record fields must be scalar, got {s!r}")

    def __str__(self):
        return "{" + ", ".join(f"{n}: {s}" for n, s in self.fields) + "}"


UNIT = RecordSort(())
ColorSort = Union[str, RecordSort]


def conforms(value: Any, sort: ColorSort) -> bool:
    if isinstance(sort, RecordSort):
        if not isinstance(value, VarMap) or set(value) != {n for n, _ in sort.fields}:
            return False
        return all(kind_of(value[n]) == s for n, s in sort.fields)
    return not isinstance(value, VarMap) and kind_of(value) == sort


class Token(NamedTuple):
    value: Any
    time: Fraction

    def __str__(self):
        return f"{format_value(self.value)}@{format_value(self.time)}"


def token_key(t: Token):
    return (value_key(t.value), t.time)


@dataclass(frozen=True)
class Place:
    name: str
    sort: ColorSort = "NUM"
    port: str = "none"  # none | in | out
    channel: str | None = None

    def __post_init__(self):
        if self.port not in ("none", "in", "out"):
            raise ValueError(f"bad port kind {self.port!r}")
        if self.port != "none" and self.channel is None:
            object.__setattr__(self, "channel", default_channel_name(self.name))


def default_channel_name(place_name: str) -> str:
    """``"Train inbound"`` -> ``"TrainInbound"``."""
    words = re.findall(r"[A-Za-z0-9]+", place_name)
    return "".join(w[:1].upper() + w[1:] for w in words) or place_name


@dataclass(frozen=True)
class Transition:
    name: str
    guard: Expr = Lit(True)
    delay: Expr = Lit(Fraction(0))


@dataclass(frozen=True)
class Arc:
    place: str
    transition: str
    direction: str  # "in": place -> transition, "out": transition -> place
    inscription: Any = None  # Expr, or {field: Expr} for record outputs, or None for UNIT
    delay: Expr | None = None


class CPNModelError(HetcoError):
    pass


@dataclass(frozen=True)
class CPNModel:
    name: str
    places: tuple
    transitions: tuple
    arcs: tuple
    initial: tuple = ()  # default marking: ((place, (Token, ...)), ...)
    _inputs: dict = field(default=None, compare=False, repr=False)
    _outputs: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        places = {p.name: p for p in self.places}
        trans = {t.name: t for t in self.transitions}
        if len(places) != len(self.places):
            raise CPNModelError("duplicate place name")
        if len(trans) != len(self.transitions):
            raise CPNModelError("duplicate transition name")
        chans = [p.channel for p in self.places if p.port != "none"]
        if len(set(chans)) != len(chans):
            raise CPNModelError("duplicate port channel name")
        inputs = {t: [] for t in trans}
        outputs = {t: [] for t in trans}
        for a in self.arcs:
            if a.place not in places:
                raise CPNModelError(f"arc references unknown place {a.place!r}")
            if a.transition not in trans:
                raise CPNModelError(f"arc references unknown transition {a.transition!r}")
            if a.direction == "in":
                if not isinstance(a.inscription, (Var, Lit)):
                    raise CPNModelError(
                        f"input arc {a.place!r} -> {a.transition!r}: pattern must be a variable or a literal"
                    )
                inputs[a.transition].append(a)
            elif a.direction == "out":
                outputs[a.transition].append(a)
            else:
                raise CPNModelError(f"bad arc direction {a.direction!r}")
        for t in self.transitions:
            bound = {a.inscription.name for a in inputs[t.name] if isinstance(a.inscription, Var)}
            used = set(free_vars(t.guard)) | set(free_vars(t.delay))
            for a in outputs[t.name]:
                used |= _inscription_vars(a.inscription)
                if a.delay is not None:
                    used |= set(free_vars(a.delay))
            if used - bound:
                raise CPNModelError(f"transition {t.name!r} uses unbound variables {sorted(used - bound)}")
        for place, toks in self.initial:
            if place not in places:
                raise CPNModelError(f"initial marking names unknown place {place!r}")
            for tok in toks:
                if not conforms(tok.value, places[place].sort):
                    raise CPNModelError(f"initial token {tok} does not conform to sort of {place!r}")
        object.__setattr__(self, "_inputs", inputs)
        object.__setattr__(self, "_outputs", outputs)

    def place(self, name: str) -> Place:
        for p in self.places:
            if p.name == name:
                return p
        raise KeyError(name)

    def port(self, channel: str) -> Place | None:
        for p in self.places:
            if p.port != "none" and p.channel == channel:
                return p
        return None

    def inputs(self, transition: str) -> list:
        return self._inputs[transition]

    def outputs(self, transition: str) -> list:
        return self._outputs[transition]


def _inscription_vars(ins) -> set:
    if ins is None:
        return set()
    if isinstance(ins, dict):
        return set().union(*(free_vars(e) for e in ins.values()))
    return set(free_vars(ins))


def make_marking(m) -> tuple:
    """Canonical marking: non-empty places in name order, tokens sorted."""
    items = m.items() if isinstance(m, dict) else m
    out = {}
    for place, toks in items:
        toks = [t if isinstance(t, Token) else Token(*t) for t in toks]
        toks = [Token(t.value if isinstance(t.value, VarMap) else as_value(t.value), Fraction(t.time)) for t in toks]
        if toks:
            out.setdefault(place, []).extend(toks)
    return tuple((p, tuple(sorted(ts, key=token_key))) for p, ts in sorted(out.items()))


@dataclass(frozen=True)
class CPNState:
    marking: tuple

    def __repr__(self):
        # hand-written: part of every configuration's canonical encoding
        return f"CPNState({self.marking!r})"

    def tokens(self, place: str) -> tuple:
        for p, ts in self.marking:
            if p == place:
                return ts
        return ()

    def count(self, place: str) -> int:
        return len(self.tokens(place))

    def size(self) -> int:
        return sum(len(ts) for _, ts in self.marking)

    def as_dict(self) -> dict:
        return {p: list(ts) for p, ts in self.marking}


def _remove(marking: tuple, consumed) -> tuple:
    d = {p: list(ts) for p, ts in marking}
    for place, tok in consumed:
        toks = d.get(place, [])
        for i, t in enumerate(toks):
            if same_value(t.value, tok.value) and t.time == tok.time:
                del toks[i]
                break
        else:
            raise NotEnabled(f"token {tok} not present in {place!r}")
    return make_marking(d)


def _add(marking: tuple, produced) -> tuple:
    d = {p: list(ts) for p, ts in marking}
    for place, tok in produced:
        d.setdefault(place, []).append(tok)
    return make_marking(d)


@dataclass(frozen=True)
class CPNBinding:
    transition: str
    env: VarMap
    consumed: tuple  # ((place, Token), ...), sorted


def enabled_bindings(model: CPNModel, marking: tuple, now) -> list[CPNBinding]:
    """All distinct ways each transition can fire at ``now``.

    Each input arc takes a distinct token whose timestamp is ``<= now``;
    bindings that differ only in which of several identical tokens was picked
    collapse into one.
    """
    state = CPNState(marking)
    results = []
    seen = set()
    for t in model.transitions:
        arcs = model.inputs(t.name)
        avail = {a.place: [tok for tok in state.tokens(a.place) if tok.time <= now] for a in arcs}

        def extend(i, env, used, picked):
            if i == len(arcs):
                try:
                    ok = eval_expr(t.guard, env)
                except EvalError as exc:
                    raise with_context(exc, f"guard of transition {t.name!r}") from exc
                if ok is not True and ok is not False:
                    raise TypeMismatch(f"guard of transition {t.name!r} is not boolean")
                if ok:
                    consumed = tuple(sorted(picked, key=lambda pt: (pt[0], token_key(pt[1]))))
                    key = (t.name, VarMap(env), consumed)
                    if key not in seen:
                        seen.add(key)
                        results.append(CPNBinding(t.name, VarMap(env), consumed))
                return
            arc = arcs[i]
            tried = []
            for j, tok in enumerate(avail[arc.place]):
                if (arc.place, j) in used:
                    continue
                if any(same_value(tok.value, u.value) and tok.time == u.time for u in tried):
                    continue
                tried.append(tok)
                pat = arc.inscription
                env2 = env
                if isinstance(pat, Lit):
                    if not same_value(pat.value, tok.value):
                        continue
                elif pat.name in env:
                    if not same_value(env[pat.name], tok.value):
                        continue
                else:
                    env2 = {**env, pat.name: tok.value}
                extend(i + 1, env2, used | {(arc.place, j)}, picked + [(arc.place, tok)])

        extend(0, {}, frozenset(), [])
    return results


def _eval_num(e: Expr, env, what: str) -> Fraction:
    v = eval_expr(e, env)
    if not isinstance(v, Fraction):
        raise TypeMismatch(f"{what} must be a number, got {format_value(v)}")
    return v


def fire(model: CPNModel, marking: tuple, binding: CPNBinding, now) -> tuple:
    if binding not in enabled_bindings(model, marking, now):
        raise NotEnabled(f"transition {binding.transition!r} is not enabled with {dict(binding.env)}")
    return _fire_unchecked(model, marking, binding, now)


def _fire_unchecked(model: CPNModel, marking: tuple, binding: CPNBinding, now) -> tuple:
    t = next(t for t in model.transitions if t.name == binding.transition)
    env = binding.env
    base = _eval_num(t.delay, env, f"delay of {t.name!r}")
    produced = []
    for arc in model.outputs(t.name):
        delay = base + (_eval_num(arc.delay, env, f"arc delay {t.name!r} -> {arc.place!r}") if arc.delay is not None else 0)
        if delay < 0:
            raise NegativeDelay(f"transition {t.name!r} produced negative delay {delay} towards {arc.place!r}")
        place = model.place(arc.place)
        ins = arc.inscription
        if ins is None:
            value = EMPTY
        elif isinstance(ins, dict):
            value = VarMap({k: eval_expr(e, env) for k, e in ins.items()})
        else:
            value = eval_expr(ins, env)
        if not conforms(value, place.sort):
            raise TypeMismatch(f"transition {t.name!r} produced {format_value(value)} for place {arc.place!r} of sort {place.sort}")
        produced.append((arc.place, Token(value, now + delay)))
    return _add(_remove(marking, binding.consumed), produced)


def cpn_mte(marking: tuple, now):
    best = INFINITY
    for _, toks in marking:
        for tok in toks:
            if tok.time > now:
                best = min(best, tok.time - now)
    return best


def cpn_to_broker(token: Token) -> VarMap:
    if isinstance(token.value, VarMap):
        return token.value
    return VarMap({"value": token.value})


def cpn_from_broker(data, sort: ColorSort, now) -> Token:
    if isinstance(sort, RecordSort):
        fields = {}
        for name, s in sort.fields:
            if name not in data:
                raise MissingKey(name)
            if kind_of(data[name]) != s:
                raise TypeMismatch(f"field {name!r} expects {s}, got {format_value(data[name])}")
            fields[name] = data[name]
        return Token(VarMap(fields), Fraction(now))
    if "value" not in data:
        raise MissingKey("value")
    v = data["value"]
    if isinstance(v, VarMap) or kind_of(v) != sort:
        raise TypeMismatch(f"value expects {sort}, got {format_value(v)}")
    return Token(v, Fraction(now))


class CPNAdapter(Adapter):
    language = "cpn"

    def channels(self):
        return [(p.channel, p.port) for p in self.model.places if p.port != "none"]

    def initial_state(self, overrides=None):
        marking = dict((p, list(ts)) for p, ts in self.model.initial)
        for place, toks in ((overrides or {}).get("marking") or {}).items():
            marking[place] = list(toks)
        for place, toks in marking.items():
            p = self.model.place(place)
            for tok in toks:
                value = tok.value if isinstance(tok, Token) else tok[0]
                if not conforms(value if isinstance(value, VarMap) else as_value(value), p.sort):
                    raise TypeMismatch(f"token {format_value(as_value(value))} does not conform to {place!r} ({p.sort})")
        return CPNState(make_marking(marking))

    def internal_actions(self, state, now):
        out = []
        for b in enabled_bindings(self.model, state.marking, now):
            marking = _fire_unchecked(self.model, state.marking, b, now)
            out.append((ActionLabel("fire", None, b.transition, params_of(b.env)), CPNState(marking)))
        return out

    def ingest_offer(self, state, channel, now):
        place = self.model.port(channel)
        if place is None or place.port != "out":
            return []
        out = []
        seen = []
        for tok in state.tokens(place.name):
            if tok.time > now or tok in seen:
                continue
            seen.append(tok)
            data = cpn_to_broker(tok)
            out.append((ActionLabel("ingest", None, channel, params_of(data)), data,
                        CPNState(_remove(state.marking, [(place.name, tok)]))))
        return out

    def deliver(self, state, channel, data, now):
        place = self.model.port(channel)
        if place is None or place.port != "in":
            raise HetcoError(f"{channel!r} is not an input port of {self.model.name!r}")
        tok = cpn_from_broker(data, place.sort, now)
        return CPNState(_add(state.marking, [(place.name, tok)]))

    def mte(self, state, now):
        return cpn_mte(state.marking, now)

    def eval_atom(self, state, query):
        if isinstance(query, TokenCount):
            return compare(state.count(query.place), query.cmp, query.n)
        raise TypeError(f"CPN instances do not answer {type(query).__name__}")

    def check_atom(self, query):
        if not isinstance(query, TokenCount):
            return f"net {self.model.name!r} only supports token-count propositions"
        if query.place not in {p.name for p in self.model.places}:
            return f"net {self.model.name!r} has no place {query.place!r}"
        return None

    def describe(self, state):
        if not state.marking:
            return "(empty)"
        return "; ".join(f"{p}: " + " ".join(str(t) for t in ts) for p, ts in state.marking)
