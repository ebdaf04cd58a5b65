"""Broker-side data: channel references, packets, bindings and per-binding transforms."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .errors import KeyCollision
from .values import VarMap


@dataclass(frozen=True, order=True)
class ChannelRef:
    instance: str
    channel: str

    def __post_init__(self):
        if not self.instance or not self.channel:
            raise ValueError("channel references need an instance and a channel name")

    def __repr__(self):
        return f"ChannelRef({self.instance!r}, {self.channel!r})"

    def __str__(self):
        return f"{self.instance}.{self.channel}"


@dataclass(frozen=True)
class KeyRename:
    old: str
    new: str


@dataclass(frozen=True)
class EventRename:
    old: str
    new: str


@dataclass(frozen=True)
class EventSet:
    name: str


TransformRule = Union[KeyRename, EventRename, EventSet]


@dataclass(frozen=True)
class BindingSpec:
    source: ChannelRef
    target: ChannelRef
    transform: tuple = ()
    line: int | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Packet:
    # ids are path-local bookkeeping; they take no part in state identity
    id: int = field(compare=False, repr=False)
    data: VarMap
    channel: ChannelRef
    binding: int

    def __repr__(self):
        return f"Packet({self.data!r}, {self.channel!r}, {self.binding})"


def apply_transform(data: VarMap, transform) -> VarMap:
    """Apply rename/set rules left to right.

    A :class:`KeyRename` whose source key is absent is skipped; renaming onto
    an existing key raises :class:`KeyCollision`.
    """
    d = dict(data)
    for rule in transform:
        if isinstance(rule, KeyRename):
            if rule.old not in d or rule.old == rule.new:
                continue
            if rule.new in d:
                raise KeyCollision(rule.new)
            d[rule.new] = d.pop(rule.old)
        elif isinstance(rule, EventRename):
            if d.get("event") == rule.old and isinstance(d.get("event"), str):
                d["event"] = rule.new
        elif isinstance(rule, EventSet):
            d["event"] = rule.name
        else:
            raise TypeError(f"unknown transform rule {rule!r}")
    return VarMap(d)
