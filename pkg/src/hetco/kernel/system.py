"""Global configurations and the coordinated transition relation.

Instantaneous steps (instance actions and the broker's ingest/move/deliver)
are urgent: the single ``tick`` rule that advances the global clock is only
enabled when none of them is, and a configuration where nothing at all can
happen gets an explicit ``stutter`` self-loop.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Iterable, Mapping

from .adapter import INFINITY, ActionLabel, Adapter, AtomQuery, params_of
from .broker import BindingSpec, Packet, apply_transform
from .errors import ConfigFault, HetcoError
from .values import format_value

TICK = "tick"
STUTTER = "stutter"


@dataclass(frozen=True)
class Instance:
    id: str
    language: str
    adapter: Adapter = field(repr=False)


class System:
    """Static part of a coordinated system: instances, bindings and the time horizon."""

    def __init__(self, instances: Iterable[Instance], bindings: Iterable[BindingSpec], horizon):
        self.instances = tuple(sorted(instances, key=lambda i: i.id))
        self.bindings = tuple(bindings)
        self.horizon = Fraction(horizon)
        if self.horizon < 0:
            raise ValueError("horizon must be non-negative")
        self._index = {inst.id: k for k, inst in enumerate(self.instances)}
        if len(self._index) != len(self.instances):
            raise ValueError("duplicate instance id")

    def index(self, instance_id: str) -> int:
        return self._index[instance_id]

    def adapter(self, instance_id: str) -> Adapter:
        return self.instances[self._index[instance_id]].adapter

    def initial(self, states: Mapping[str, Any] | None = None) -> "GlobalConfig":
        """Initial configuration at clock 0; missing states come from each adapter's default."""
        states = dict(states or {})
        tup = tuple(
            states.pop(inst.id) if inst.id in states else inst.adapter.initial_state()
            for inst in self.instances
        )
        if states:
            raise KeyError(f"unknown instances: {sorted(states)}")
        return GlobalConfig(self, Fraction(0), tup)

    def with_bindings(self, bindings: Iterable[BindingSpec]) -> "System":
        return System(self.instances, bindings, self.horizon)

    def with_horizon(self, horizon) -> "System":
        return System(self.instances, self.bindings, horizon)


@dataclass(frozen=True)
class GlobalConfig:
    system: System = field(compare=False, repr=False)
    clock: Fraction
    states: tuple
    inbuf: tuple = ()
    outbuf: tuple = ()
    next_packet: int = field(default=0, compare=False, repr=False)

    @property
    def horizon(self) -> Fraction:
        return self.system.horizon

    @property
    def bindings(self) -> tuple:
        return self.system.bindings

    @property
    def instances(self) -> dict:
        return {inst.id: (inst.language, s) for inst, s in zip(self.system.instances, self.states)}

    def state_of(self, instance_id: str):
        return self.states[self.system.index(instance_id)]

    def with_state(self, k: int, state) -> "GlobalConfig":
        states = self.states[:k] + (state,) + self.states[k + 1:]
        return GlobalConfig(self.system, self.clock, states, self.inbuf, self.outbuf, self.next_packet)

    @cached_property
    def canonical(self) -> bytes:
        # instance states are canonical by construction (sorted multisets, key-ordered maps)
        return repr((self.clock, self.states, self.inbuf, self.outbuf)).encode()

    @cached_property
    def fingerprint(self) -> bytes:
        return hashlib.blake2b(self.canonical, digest_size=16).digest()


def fingerprint(cfg: GlobalConfig) -> bytes:
    """128-bit digest of the canonical encoding (clock, instance states, buffers)."""
    return cfg.fingerprint


def eval_atom(cfg: GlobalConfig, query: AtomQuery) -> bool:
    return cfg.system.adapter(query.instance).eval_atom(cfg.state_of(query.instance), query)


def mte_global(cfg: GlobalConfig):
    result = INFINITY
    for inst, state in zip(cfg.system.instances, cfg.states):
        result = min(result, inst.adapter.mte(state, cfg.clock))
    return result


def _ingest(cfg: GlobalConfig, b_idx: int) -> list[tuple[ActionLabel, GlobalConfig]]:
    binding = cfg.system.bindings[b_idx]
    src = binding.source
    k = cfg.system.index(src.instance)
    adapter = cfg.system.instances[k].adapter
    out = []
    for label, data, state in adapter.ingest_offer(cfg.states[k], src.channel, cfg.clock):
        packet = Packet(cfg.next_packet, data, src, b_idx)
        nxt = GlobalConfig(
            cfg.system,
            cfg.clock,
            cfg.states[:k] + (state,) + cfg.states[k + 1:],
            cfg.inbuf + (packet,),
            cfg.outbuf,
            cfg.next_packet + 1,
        )
        out.append((ActionLabel("ingest", src.instance, src.channel, label.params), nxt))
    return out


def broker_ingest(cfg: GlobalConfig, binding: int) -> list[GlobalConfig]:
    """One successor per datum the source adapter offers on the binding's source channel."""
    return [c for _, c in _ingest(cfg, binding)]


def _move(cfg: GlobalConfig):
    if not cfg.inbuf:
        return None
    head = cfg.inbuf[0]
    binding = cfg.system.bindings[head.binding]
    try:
        data = apply_transform(head.data, binding.transform)
    except HetcoError as exc:
        raise ConfigFault(f"transform of binding {binding.source} -> {binding.target} failed: {exc}", head.binding) from exc
    moved = Packet(head.id, data, binding.target, head.binding)
    nxt = GlobalConfig(cfg.system, cfg.clock, cfg.states, cfg.inbuf[1:], cfg.outbuf + (moved,), cfg.next_packet)
    label = ActionLabel("move", None, f"{binding.source}->{binding.target}", params_of(data))
    return label, nxt


def broker_move(cfg: GlobalConfig) -> GlobalConfig | None:
    r = _move(cfg)
    return None if r is None else r[1]


def _deliver(cfg: GlobalConfig):
    if not cfg.outbuf:
        return None
    head = cfg.outbuf[0]
    tgt = head.channel
    k = cfg.system.index(tgt.instance)
    adapter = cfg.system.instances[k].adapter
    binding = cfg.system.bindings[head.binding]
    try:
        state = adapter.deliver(cfg.states[k], tgt.channel, head.data, cfg.clock)
    except HetcoError as exc:
        raise ConfigFault(
            f"delivery over binding {binding.source} -> {binding.target} failed: {exc}", head.binding
        ) from exc
    nxt = GlobalConfig(
        cfg.system, cfg.clock, cfg.states[:k] + (state,) + cfg.states[k + 1:], cfg.inbuf, cfg.outbuf[1:], cfg.next_packet
    )
    return ActionLabel("deliver", tgt.instance, tgt.channel, params_of(head.data)), nxt


def broker_deliver(cfg: GlobalConfig) -> GlobalConfig | None:
    r = _deliver(cfg)
    return None if r is None else r[1]


def instantaneous_successors(cfg: GlobalConfig) -> list[tuple[ActionLabel, GlobalConfig]]:
    out = []
    now = cfg.clock
    for k, inst in enumerate(cfg.system.instances):
        for label, state in inst.adapter.internal_actions(cfg.states[k], now):
            out.append((label.at(inst.id), cfg.with_state(k, state)))
    for b in range(len(cfg.system.bindings)):
        out.extend(_ingest(cfg, b))
    for step in (_move(cfg), _deliver(cfg)):
        if step is not None:
            out.append(step)
    return out


def _advance(cfg: GlobalConfig):
    if cfg.clock >= cfg.horizon:
        return None
    m = mte_global(cfg)
    if m == INFINITY or m <= 0:
        return None
    d = min(m, cfg.horizon - cfg.clock)
    states = tuple(inst.adapter.delta(s, d) for inst, s in zip(cfg.system.instances, cfg.states))
    nxt = GlobalConfig(cfg.system, cfg.clock + d, states, cfg.inbuf, cfg.outbuf, cfg.next_packet)
    return ActionLabel(TICK, None, f"+{format_value(d)}"), nxt


def tick(cfg: GlobalConfig) -> GlobalConfig | None:
    """Advance the clock by the global maximum time elapse, capped at the horizon.

    Disabled while any instantaneous step is possible, when no timer is pending
    (infinite mte) and once the clock has reached the horizon.
    """
    if instantaneous_successors(cfg):
        return None
    r = _advance(cfg)
    return None if r is None else r[1]


def successors(cfg: GlobalConfig) -> list[tuple[ActionLabel, GlobalConfig]]:
    out = instantaneous_successors(cfg)
    if out:
        return out
    t = _advance(cfg)
    if t is not None:
        return [t]
    return [(ActionLabel(STUTTER), cfg)]
