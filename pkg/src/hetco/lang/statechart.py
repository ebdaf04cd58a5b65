"""Flat statecharts with variables, event pools, timed and eventless transitions.

Event pools are FIFO. A dispatch pops the head of one in-pool and fires every
matching transition as a separate successor; an event that matches nothing is
dropped as its own labelled step. ``After(d)`` fires once ``d`` has passed
since the current state was entered; self-loops re-enter and restart the timer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from ..kernel.adapter import INFINITY, ActionLabel, Adapter, InState, VarCmp, compare, params_of
from ..kernel.errors import EvalError, with_context, HetcoError, MissingKey, TypeMismatch
from ..kernel.expr import Expr, Lit, eval_expr
from ..kernel.values import VarMap, as_value, format_value, kind_of


@dataclass(frozen=True)
class Event:
    pool: str
    name: str

    def __str__(self):
        return f"{self.pool}.{self.name}"


@dataclass(frozen=True)
class After:
    duration: Expr

    def __str__(self):
        from ..kernel.expr import to_source

        return f"after({to_source(self.duration)})"


Trigger = Union[Event, After, None]


@dataclass(frozen=True)
class Raise:
    pool: str
    event: str
    payload: tuple = ()  # ((key, Expr), ...)


@dataclass(frozen=True)
class Assign:
    var: str
    expr: Expr


Effect = Union[Raise, Assign]


@dataclass(frozen=True)
class SCTransition:
    source: str
    target: str
    trigger: Trigger = None
    guard: Expr = Lit(True)
    effects: tuple = ()


class SCModelError(HetcoError):
    pass


@dataclass(frozen=True)
class SCModel:
    name: str
    states: tuple
    initial: str
    vars: tuple  # ((name, Expr), ...)
    pools: tuple  # ((name, "in" | "out"), ...)
    transitions: tuple
    _from: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if len(set(self.states)) != len(self.states):
            raise SCModelError("duplicate state name")
        if self.initial not in self.states:
            raise SCModelError(f"initial state {self.initial!r} is not declared")
        pools = dict(self.pools)
        if len(pools) != len(self.pools):
            raise SCModelError("duplicate pool name")
        names = [n for n, _ in self.vars]
        if len(set(names)) != len(names):
            raise SCModelError("duplicate variable name")
        outgoing = {s: [] for s in self.states}
        for k, t in enumerate(self.transitions):
            where = f"transition {t.source!r} -> {t.target!r}"
            if t.source not in outgoing or t.target not in outgoing:
                raise SCModelError(f"{where} references an undeclared state")
            if isinstance(t.trigger, Event) and pools.get(t.trigger.pool) != "in":
                raise SCModelError(f"{where}: trigger pool {t.trigger.pool!r} is not an in-pool")
            for eff in t.effects:
                if isinstance(eff, Raise) and pools.get(eff.pool) != "out":
                    raise SCModelError(f"{where}: raise targets {eff.pool!r}, which is not an out-pool")
                if isinstance(eff, Assign) and eff.var not in names:
                    raise SCModelError(f"{where}: assignment to undeclared variable {eff.var!r}")
            outgoing[t.source].append((k, t))
        object.__setattr__(self, "_from", outgoing)

    def outgoing(self, state: str) -> list:
        return self._from[state]

    def pool_names(self, direction: str) -> list:
        return [n for n, d in self.pools if d == direction]

    def reachable_states(self) -> set:
        seen = {self.initial}
        todo = [self.initial]
        while todo:
            s = todo.pop()
            for _, t in self._from[s]:
                if t.target not in seen:
                    seen.add(t.target)
                    todo.append(t.target)
        return seen


@dataclass(frozen=True)
class SCState:
    current: str
    env: VarMap
    in_queues: tuple  # ((pool, ((event, payload), ...)), ...)
    out_queues: tuple
    entered_at: Fraction = Fraction(0)

    def __repr__(self):
        return f"SCState({self.current!r}, {self.env!r}, {self.in_queues!r}, {self.out_queues!r}, {self.entered_at!r})"

    def queue(self, pool: str) -> tuple:
        for p, q in self.in_queues + self.out_queues:
            if p == pool:
                return q
        raise KeyError(pool)


def _set_queue(queues: tuple, pool: str, q: tuple) -> tuple:
    return tuple((p, q if p == pool else old) for p, old in queues)


def sc_to_broker(event: str, payload) -> VarMap:
    return VarMap(payload).set("event", event)


def sc_from_broker(data) -> tuple[str, VarMap]:
    if "event" not in data:
        raise MissingKey("event")
    name = data["event"]
    if not isinstance(name, str):
        raise TypeMismatch(f"'event' must be a string, got {format_value(name)}")
    return name, VarMap(data).without("event")


def _apply_effects(model: SCModel, st: SCState, t: SCTransition, scope: dict, now) -> SCState:
    env = dict(st.env)
    outq = st.out_queues
    for eff in t.effects:
        try:
            if isinstance(eff, Assign):
                env[eff.var] = eval_expr(eff.expr, _scope(env, scope))
            else:
                payload = VarMap({k: eval_expr(e, _scope(env, scope)) for k, e in eff.payload})
                outq = _set_queue(outq, eff.pool, dict(outq)[eff.pool] + ((eff.event, payload),))
        except EvalError as exc:
            raise with_context(exc, f"effect of {t.source!r} -> {t.target!r} in {model.name!r}") from exc
    return SCState(t.target, VarMap(env), st.in_queues, outq, Fraction(now))


def _scope(env: dict, payload) -> dict:
    # event payload is visible by key, shadowing variables of the same name
    return {**env, **payload}


def _guard(model: SCModel, t: SCTransition, scope) -> bool:
    try:
        v = eval_expr(t.guard, scope)
    except EvalError as exc:
        raise with_context(exc, f"guard of {t.source!r} -> {t.target!r} in {model.name!r}") from exc
    if not isinstance(v, bool):
        raise TypeMismatch(f"guard of {t.source!r} -> {t.target!r} is not boolean")
    return v


def _rule(k: int, t: SCTransition) -> str:
    return f"{t.source} -> {t.target}"


def dispatch_event(model: SCModel, st: SCState, pool: str, now) -> list[tuple[ActionLabel, SCState]]:
    q = dict(st.in_queues).get(pool, ())
    if not q:
        return []
    (name, payload), rest = q[0], q[1:]
    popped = SCState(st.current, st.env, _set_queue(st.in_queues, pool, rest), st.out_queues, st.entered_at)
    out = []
    scope = _scope(dict(st.env), payload)
    for k, t in model.outgoing(st.current):
        if isinstance(t.trigger, Event) and t.trigger.pool == pool and t.trigger.name == name:
            if _guard(model, t, scope):
                nxt = _apply_effects(model, popped, t, payload, now)
                label = ActionLabel("dispatch", None, _rule(k, t), (("event", f"{pool}.{name}"),) + params_of(payload))
                out.append((label, nxt))
    if not out:
        out.append((ActionLabel("drop", None, f"{pool}.{name}", params_of(payload)), popped))
    return out


def _duration(model: SCModel, t: SCTransition, env) -> Fraction:
    d = eval_expr(t.trigger.duration, env)
    if not isinstance(d, Fraction) or d < 0:
        raise TypeMismatch(f"after() duration on {t.source!r} -> {t.target!r} must be a non-negative number")
    return d


def timed_and_eventless_actions(model: SCModel, st: SCState, now) -> list[tuple[ActionLabel, SCState]]:
    out = []
    env = dict(st.env)
    for k, t in model.outgoing(st.current):
        if isinstance(t.trigger, After):
            d = _duration(model, t, env)
            if now >= st.entered_at + d and _guard(model, t, env):
                out.append((ActionLabel("timeout", None, _rule(k, t), (("after", format_value(d)),)),
                            _apply_effects(model, st, t, {}, now)))
        elif t.trigger is None and _guard(model, t, env):
            out.append((ActionLabel("step", None, _rule(k, t)), _apply_effects(model, st, t, {}, now)))
    return out


def sc_mte(model: SCModel, st: SCState, now):
    best = INFINITY
    env = dict(st.env)
    for _, t in model.outgoing(st.current):
        if isinstance(t.trigger, After):
            remaining = st.entered_at + _duration(model, t, env) - now
            if remaining > 0:
                best = min(best, remaining)
    return best


class StatechartAdapter(Adapter):
    language = "statechart"

    def channels(self):
        return list(self.model.pools)

    def initial_state(self, overrides=None):
        overrides = (overrides or {}).get("vars") or {}
        unknown = set(overrides) - {n for n, _ in self.model.vars}
        if unknown:
            raise TypeMismatch(f"override of undeclared variables {sorted(unknown)}")
        env = {}
        for name, init in self.model.vars:
            if name in overrides:
                v = overrides[name]
                v = eval_expr(v, env) if not isinstance(v, (Fraction, bool, str, int, float)) else as_value(v)
                default = _try_eval(init, env)
                if default is not None and kind_of(default) != kind_of(v):
                    raise TypeMismatch(
                        f"override of {name!r} has kind {kind_of(v)}, declared initializer has {kind_of(default)}"
                    )
                env[name] = v
            else:
                env[name] = eval_expr(init, env)
        return SCState(
            self.model.initial,
            VarMap(env),
            tuple((p, ()) for p in sorted(self.model.pool_names("in"))),
            tuple((p, ()) for p in sorted(self.model.pool_names("out"))),
            Fraction(0),
        )

    def internal_actions(self, state, now):
        out = []
        for pool, q in state.in_queues:
            if q:
                out.extend(dispatch_event(self.model, state, pool, now))
        out.extend(timed_and_eventless_actions(self.model, state, now))
        return out

    def ingest_offer(self, state, channel, now):
        q = dict(state.out_queues).get(channel)
        if not q:
            return []
        (name, payload), rest = q[0], q[1:]
        data = sc_to_broker(name, payload)
        nxt = SCState(state.current, state.env, state.in_queues, _set_queue(state.out_queues, channel, rest), state.entered_at)
        return [(ActionLabel("ingest", None, channel, params_of(data)), data, nxt)]

    def deliver(self, state, channel, data, now):
        if dict(self.model.pools).get(channel) != "in":
            raise HetcoError(f"{channel!r} is not an in-pool of {self.model.name!r}")
        name, payload = sc_from_broker(data)
        q = dict(state.in_queues)[channel] + ((name, payload),)
        return SCState(state.current, state.env, _set_queue(state.in_queues, channel, q), state.out_queues, state.entered_at)

    def mte(self, state, now):
        return sc_mte(self.model, state, now)

    def eval_atom(self, state, query):
        if isinstance(query, InState):
            return state.current == query.state
        if isinstance(query, VarCmp):
            v = state.env[query.var]
            if kind_of(v) != kind_of(query.value):
                return False
            if query.cmp not in ("=", "==", "!=") and not isinstance(v, Fraction):
                return False
            return compare(v, query.cmp, query.value)
        raise TypeError(f"statecharts do not answer {type(query).__name__}")

    def check_atom(self, query):
        if isinstance(query, InState):
            if query.state not in self.model.states:
                return f"statechart {self.model.name!r} has no state {query.state!r}"
            return None
        if isinstance(query, VarCmp):
            if query.var not in {n for n, _ in self.model.vars}:
                return f"statechart {self.model.name!r} has no variable {query.var!r}"
            return None
        return f"statechart {self.model.name!r} does not support {type(query).__name__} propositions"

    def describe(self, state):
        parts = [state.current, f"since {format_value(state.entered_at)}"]
        if state.env:
            parts.append(", ".join(f"{k}={format_value(v)}" for k, v in state.env.items()))
        for p, q in state.in_queues + state.out_queues:
            if q:
                parts.append(f"{p}=[" + ", ".join(_event_str(n, pl) for n, pl in q) + "]")
        return "; ".join(parts)


def _event_str(name, payload) -> str:
    if not payload:
        return name
    return name + "(" + ", ".join(f"{k}={format_value(v)}" for k, v in payload.items()) + ")"


def _try_eval(e: Expr, env):
    try:
        return eval_expr(e, env)
    except EvalError:
        return None
