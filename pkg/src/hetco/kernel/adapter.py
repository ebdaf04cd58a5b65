"""The contract every behavioural language implements to take part in coordination."""

from __future__ import annotations

import json
import math
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Any, Union

from .values import Value, VarMap, format_value

INFINITY = math.inf

_PLAIN = re.compile(r"^[A-Za-z0-9_.+#:/<=>-]+$")


@dataclass(frozen=True)
class ActionLabel:
    """Name of one rule application, e.g. ``fire sensor "Inbound train measured" v=40``."""

    kind: str
    instance: str | None = None
    rule: str | None = None
    params: tuple = ()

    def at(self, instance: str) -> "ActionLabel":
        return replace(self, instance=instance)

    def __str__(self):
        parts = [self.kind]
        if self.instance:
            parts.append(self.instance)
        if self.rule is not None:
            parts.append(self.rule if _PLAIN.match(self.rule) else json.dumps(self.rule, ensure_ascii=False))
        parts.extend(f"{k}={v}" for k, v in self.params)
        return " ".join(parts)


def params_of(env) -> tuple:
    return tuple((k, format_value(v)) for k, v in sorted(env.items()))


@dataclass(frozen=True)
class InState:
    instance: str
    state: str


@dataclass(frozen=True)
class TokenCount:
    instance: str
    place: str
    cmp: str
    n: int


@dataclass(frozen=True)
class VarCmp:
    instance: str
    var: str
    cmp: str
    value: Value


AtomQuery = Union[InState, TokenCount, VarCmp]

CMP_OPS = ("<=", ">=", "==", "!=", "=", "<", ">")


def compare(a: Any, op: str, b: Any) -> bool:
    if op in ("=", "=="):
        return a == b
    if op == "!=":
        return a != b
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    if op == ">=":
        return a >= b
    raise ValueError(f"unknown comparison {op!r}")


class Adapter(ABC):
    """Language adapter bound to one model.

    States handed to and returned from an adapter are immutable; none of the
    instantaneous operations advance time.
    """

    language: str = "?"

    def __init__(self, model):
        self.model = model

    @abstractmethod
    def channels(self) -> list[tuple[str, str]]:
        """``(name, direction)`` pairs; direction is ``"in"`` or ``"out"``."""

    @abstractmethod
    def initial_state(self, overrides: dict | None = None):
        ...

    @abstractmethod
    def internal_actions(self, state, now: Fraction) -> list[tuple[ActionLabel, Any]]:
        ...

    @abstractmethod
    def ingest_offer(self, state, channel: str, now: Fraction) -> list[tuple[ActionLabel, VarMap, Any]]:
        """Every way of taking one datum off an outgoing channel, already in canonical form."""

    @abstractmethod
    def deliver(self, state, channel: str, data: VarMap, now: Fraction):
        ...

    @abstractmethod
    def mte(self, state, now: Fraction) -> Fraction | float:
        ...

    def delta(self, state, d: Fraction):
        # bundled languages keep absolute times, so elapsing is a no-op
        return state

    @abstractmethod
    def eval_atom(self, state, query: AtomQuery) -> bool:
        ...

    @abstractmethod
    def check_atom(self, query: AtomQuery) -> str | None:
        """Return an error message if the query does not fit this model."""

    @abstractmethod
    def describe(self, state) -> str:
        ...

    def channel_direction(self, name: str) -> str | None:
        return dict(self.channels()).get(name)
