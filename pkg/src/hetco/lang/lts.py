"""Untimed labelled transition systems that exchange bare event names."""

from __future__ import annotations

from dataclasses import dataclass

from ..kernel.adapter import INFINITY, ActionLabel, Adapter, InState
from ..kernel.errors import HetcoError, MissingKey, TypeMismatch
from ..kernel.values import VarMap, format_value


@dataclass(frozen=True)
class LTSTransition:
    source: str
    target: str
    kind: str  # tau | emit | receive
    label: str  # action name for tau, event name otherwise
    channel: str | None = None


class LTSModelError(HetcoError):
    pass


@dataclass(frozen=True)
class LTSModel:
    name: str
    states: tuple
    initial: str
    channels: tuple  # ((name, "in" | "out"), ...)
    transitions: tuple

    def __post_init__(self):
        if self.initial not in self.states:
            raise LTSModelError(f"initial state {self.initial!r} is not declared")
        chans = dict(self.channels)
        for t in self.transitions:
            if t.source not in self.states or t.target not in self.states:
                raise LTSModelError(f"transition {t.source!r} -> {t.target!r} references an undeclared state")
            if t.kind == "emit" and chans.get(t.channel) != "out":
                raise LTSModelError(f"emit on {t.channel!r}, which is not an out-channel")
            if t.kind == "receive" and chans.get(t.channel) != "in":
                raise LTSModelError(f"receive on {t.channel!r}, which is not an in-channel")
            if t.kind not in ("tau", "emit", "receive"):
                raise LTSModelError(f"unknown transition kind {t.kind!r}")


@dataclass(frozen=True)
class LTSState:
    current: str
    out_queues: tuple  # ((channel, (event, ...)), ...)
    in_queues: tuple

    def __repr__(self):
        return f"LTSState({self.current!r}, {self.out_queues!r}, {self.in_queues!r})"


def _set(queues: tuple, channel: str, q: tuple) -> tuple:
    return tuple((c, q if c == channel else old) for c, old in queues)


def lts_to_broker(event: str) -> VarMap:
    return VarMap({"event": event})


def lts_from_broker(data) -> str:
    if "event" not in data:
        raise MissingKey("event")
    if not isinstance(data["event"], str):
        raise TypeMismatch(f"'event' must be a string, got {format_value(data['event'])}")
    return data["event"]


def lts_actions(model: LTSModel, st: LTSState, now=None) -> list[tuple[ActionLabel, LTSState]]:
    out = []
    inq = dict(st.in_queues)
    outq = dict(st.out_queues)
    for t in model.transitions:
        if t.source != st.current:
            continue
        if t.kind == "tau":
            out.append((ActionLabel("tau", None, t.label, (("to", t.target),)),
                        LTSState(t.target, st.out_queues, st.in_queues)))
        elif t.kind == "emit":
            q = outq[t.channel] + (t.label,)
            out.append((ActionLabel("emit", None, f"{t.channel}.{t.label}", (("to", t.target),)),
                        LTSState(t.target, _set(st.out_queues, t.channel, q), st.in_queues)))
        else:
            q = inq[t.channel]
            if q and q[0] == t.label:
                out.append((ActionLabel("receive", None, f"{t.channel}.{t.label}", (("to", t.target),)),
                            LTSState(t.target, st.out_queues, _set(st.in_queues, t.channel, q[1:]))))
    return out


class LTSAdapter(Adapter):
    language = "lts"

    def channels(self):
        return list(self.model.channels)

    def initial_state(self, overrides=None):
        current = (overrides or {}).get("initial", self.model.initial)
        if current not in self.model.states:
            raise TypeMismatch(f"initial override {current!r} is not a state of {self.model.name!r}")
        chans = self.model.channels
        return LTSState(
            current,
            tuple((c, ()) for c, d in sorted(chans) if d == "out"),
            tuple((c, ()) for c, d in sorted(chans) if d == "in"),
        )

    def internal_actions(self, state, now):
        return lts_actions(self.model, state, now)

    def ingest_offer(self, state, channel, now):
        q = dict(state.out_queues).get(channel)
        if not q:
            return []
        data = lts_to_broker(q[0])
        return [(ActionLabel("ingest", None, channel, (("event", q[0]),)), data,
                 LTSState(state.current, _set(state.out_queues, channel, q[1:]), state.in_queues))]

    def deliver(self, state, channel, data, now):
        if dict(self.model.channels).get(channel) != "in":
            raise HetcoError(f"{channel!r} is not an in-channel of {self.model.name!r}")
        q = dict(state.in_queues)[channel] + (lts_from_broker(data),)
        return LTSState(state.current, state.out_queues, _set(state.in_queues, channel, q))

    def mte(self, state, now):
        return INFINITY

    def eval_atom(self, state, query):
        if isinstance(query, InState):
            return state.current == query.state
        raise TypeError(f"LTS instances do not answer {type(query).__name__}")

    def check_atom(self, query):
        if not isinstance(query, InState):
            return f"LTS {self.model.name!r} only supports in-state propositions"
        if query.state not in self.model.states:
            return f"LTS {self.model.name!r} has no state {query.state!r}"
        return None

    def describe(self, state):
        parts = [state.current]
        for c, q in state.out_queues + state.in_queues:
            if q:
                parts.append(f"{c}=[{', '.join(q)}]")
        return "; ".join(parts)
