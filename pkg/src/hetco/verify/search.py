"""Reachability, seeded simulation and exhaustive exploration."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass

from ..kernel.errors import HetcoError
from ..kernel.system import STUTTER, GlobalConfig, successors
from .checker import StateStore
from .ltl import And, Const, Implies, Not, Or, Prop, is_temporal
from .trace import Step, Trace, letter_fn


class StateCapExceeded(HetcoError):
    pass


def holds_in(f, letter: frozenset) -> bool:
    """Truth of a propositional formula in a single state."""
    if isinstance(f, Prop):
        return f.name in letter
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Not):
        return not holds_in(f.arg, letter)
    if isinstance(f, And):
        return holds_in(f.left, letter) and holds_in(f.right, letter)
    if isinstance(f, Or):
        return holds_in(f.left, letter) or holds_in(f.right, letter)
    if isinstance(f, Implies):
        return (not holds_in(f.left, letter)) or holds_in(f.right, letter)
    raise TypeError(f"not a propositional formula: {f}")


def reachability(cfg0: GlobalConfig, goal, props: dict, max_states: int | None = None) -> Trace | None:
    """Shortest trace (by number of steps) to a state satisfying ``goal``, or None if none is reachable.

    Raises StateCapExceeded if the search is cut off before an answer is known.
    """
    if is_temporal(goal):
        raise ValueError("reachability goals must be propositional")
    letter = letter_fn(props)
    store = StateStore()
    store.intern(cfg0)
    parent = {0: None}
    todo = deque([0])
    while todo:
        c = todo.popleft()
        cfg = store[c]
        if holds_in(goal, letter(cfg)):
            steps = []
            while parent[c] is not None:
                prev, label = parent[c]
                steps.append(Step(label, store[c]))
                c = prev
            steps.reverse()
            return Trace(cfg0, steps, [])
        for label, nxt in successors(cfg):
            idx, new = store.intern(nxt)
            if new:
                if max_states is not None and len(store) > max_states:
                    raise StateCapExceeded(f"state cap of {max_states} reached before the goal was decided")
                parent[idx] = (c, label)
                todo.append(idx)
    return None


def simulate(cfg0: GlobalConfig, seed: int, until=None, max_steps: int = 100_000) -> Trace:
    """One run that resolves every choice with a seeded generator.

    Stops once the clock reaches ``until`` (default: the horizon), at the first
    stutter step, or after ``max_steps`` steps.
    """
    rng = random.Random(seed)
    stop = cfg0.horizon if until is None else until
    cfg = cfg0
    steps = []
    while cfg.clock < stop and len(steps) < max_steps:
        options = successors(cfg)
        label, nxt = options[rng.randrange(len(options))]
        if label.kind == STUTTER:
            break
        steps.append(Step(label, nxt))
        cfg = nxt
    return Trace(cfg0, steps, [])


@dataclass(frozen=True)
class Exploration:
    states: int
    transitions: int
    min_clock: object
    max_clock: object
    stutter_states: int
    complete: bool


def explore(cfg0: GlobalConfig, max_states: int | None = None) -> Exploration:
    store = StateStore()
    store.intern(cfg0)
    todo = deque([0])
    transitions = 0
    stutters = 0
    lo = hi = cfg0.clock
    complete = True
    while todo:
        cfg = store[todo.popleft()]
        lo, hi = min(lo, cfg.clock), max(hi, cfg.clock)
        for label, nxt in successors(cfg):
            transitions += 1
            if label.kind == STUTTER:
                stutters += 1
                continue
            idx, new = store.intern(nxt)
            if new:
                if max_states is not None and len(store) > max_states:
                    complete = False
                    todo.clear()
                    break
                todo.append(idx)
    return Exploration(len(store), transitions, lo, hi, stutters, complete)
