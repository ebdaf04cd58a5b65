"""Explicit-state LTL model checking of coordinated systems.

``model_check`` runs a nested depth-first search over the product of the
kernel's successor relation with a Büchi automaton for the negated formula,
built on the fly. ``brute_force_check`` decides the same question on the
fully built product through strongly connected components and serves as an
independent oracle.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass

import networkx as nx

from ..kernel.system import GlobalConfig, successors
from .buchi import BuchiAutomaton, ltl_to_buchi
from .ltl import Formula, Not, atoms
from .trace import Step, Trace, letter_fn

HOLDS = "HOLDS"
VIOLATED = "VIOLATED"
INCONCLUSIVE = "INCONCLUSIVE"

DEFAULT_MAX_STATES = 1_000_000


def default_max_states() -> int:
    raw = os.environ.get("HETCO_MAX_STATES")
    return int(raw) if raw else DEFAULT_MAX_STATES


@dataclass
class Verdict:
    status: str
    trace: Trace | None = None
    reason: str | None = None
    states: int = 0  # distinct product states stored
    configs: int = 0  # distinct system configurations stored

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    @property
    def violated(self) -> bool:
        return self.status == VIOLATED

    @property
    def inconclusive(self) -> bool:
        return self.status == INCONCLUSIVE


class StateStore:
    """Interns configurations: fingerprint buckets, confirmed by exact canonical encoding."""

    def __init__(self):
        self._buckets: dict[bytes, list[tuple[bytes, int]]] = {}
        self.configs: list[GlobalConfig] = []

    def __len__(self):
        return len(self.configs)

    def intern(self, cfg: GlobalConfig) -> tuple[int, bool]:
        bucket = self._buckets.setdefault(cfg.fingerprint, [])
        enc = cfg.canonical
        for other, idx in bucket:
            if other == enc:
                return idx, False
        idx = len(self.configs)
        bucket.append((enc, idx))
        self.configs.append(cfg)
        return idx, True

    def __getitem__(self, idx: int) -> GlobalConfig:
        return self.configs[idx]


class _Graph:
    """Lazily expanded system graph over interned configurations, with cached letters."""

    def __init__(self, props: dict):
        self.store = StateStore()
        self._letter = letter_fn(props)
        self._letters: dict[int, frozenset] = {}
        self._succ: dict[int, list] = {}

    def add(self, cfg) -> int:
        return self.store.intern(cfg)[0]

    def letter(self, c: int) -> frozenset:
        if c not in self._letters:
            self._letters[c] = self._letter(self.store[c])
        return self._letters[c]

    def succ(self, c: int) -> list:
        if c not in self._succ:
            self._succ[c] = [(label, self.add(nxt)) for label, nxt in successors(self.store[c])]
        return self._succ[c]


def _check_atoms(f: Formula, props: dict) -> None:
    missing = atoms(f) - set(props)
    if missing:
        raise KeyError(f"formula uses undefined propositions {sorted(missing)}")


def _product_succ(g: _Graph, aut: BuchiAutomaton, node) -> list:
    c, q = node
    out = []
    for label, c2 in g.succ(c):
        letter = g.letter(c2)
        for q2 in aut.succ[q]:
            if aut.admits(q2, letter):
                out.append((label, (c2, q2)))
    return out


def _to_trace(g: _Graph, path: list, loop_at: int) -> Trace:
    """``path`` is ``[(label, node), ...]`` with a ``None`` label first; the last node equals ``path[loop_at]``."""
    steps = [Step(label, g.store[node[0]]) for label, node in path[1:]]
    return Trace(g.store[path[0][1][0]], steps[:loop_at], steps[loop_at:])


def model_check(cfg0: GlobalConfig, f: Formula, props: dict, max_states: int | None = None) -> Verdict:
    """Decide whether every run from ``cfg0`` satisfies ``f``.

    ``props`` maps proposition names to atom queries. ``max_states`` bounds the
    number of product states; exceeding it yields an inconclusive verdict.
    """
    _check_atoms(f, props)
    aut = ltl_to_buchi(Not(f))
    g = _Graph(props)
    c0 = g.add(cfg0)
    roots = [(c0, q) for q in aut.initial if aut.admits(q, g.letter(c0))]
    visited1: set = set()
    visited2: set = set()
    cap = max_states if max_states is not None else float("inf")

    def verdict(status, **kw):
        return Verdict(status, states=len(visited1), configs=len(g.store), **kw)

    for root in roots:
        if root in visited1:
            continue
        visited1.add(root)
        stack = [(None, root, iter(_product_succ(g, aut, root)))]
        on_stack = {root: 0}
        while stack:
            _, node, it = stack[-1]
            pushed = False
            for label, nxt in it:
                if nxt not in visited1:
                    visited1.add(nxt)
                    if len(visited1) > cap:
                        return verdict(INCONCLUSIVE, reason=f"state cap of {max_states} product states reached")
                    on_stack[nxt] = len(stack)
                    stack.append((label, nxt, iter(_product_succ(g, aut, nxt))))
                    pushed = True
                    break
            if pushed:
                continue
            if node[1] in aut.accepting:
                inner = _inner_dfs(g, aut, node, on_stack, visited2)
                if inner is not None:
                    target = inner[-1][1]
                    i = on_stack[target]
                    outer = [(lab, n) for lab, n, _ in stack]
                    path = outer + inner
                    return verdict(VIOLATED, trace=_to_trace(g, path, i))
            stack.pop()
            del on_stack[node]
    return verdict(HOLDS)


def _inner_dfs(g, aut, seed, on_stack, visited2):
    """Search from ``seed`` for a node on the outer stack; returns the path after ``seed``."""
    visited2.add(seed)
    stack = [(None, seed, iter(_product_succ(g, aut, seed)))]
    while stack:
        _, node, it = stack[-1]
        pushed = False
        for label, nxt in it:
            if nxt in on_stack:
                return [(lab, n) for lab, n, _ in stack[1:]] + [(label, nxt)]
            if nxt not in visited2:
                visited2.add(nxt)
                stack.append((label, nxt, iter(_product_succ(g, aut, nxt))))
                pushed = True
                break
        if not pushed:
            stack.pop()
    return None


def brute_force_check(cfg0: GlobalConfig, f: Formula, props: dict, max_states: int | None = None) -> Verdict:
    """Same question as ``model_check``, answered on the explicit product graph via SCCs."""
    _check_atoms(f, props)
    aut = ltl_to_buchi(Not(f))
    g = _Graph(props)
    c0 = g.add(cfg0)
    graph = nx.DiGraph()
    roots = [(c0, q) for q in aut.initial if aut.admits(q, g.letter(c0))]
    parent: dict = {r: None for r in roots}
    order = deque(roots)
    for r in roots:
        graph.add_node(r)
    cap = max_states if max_states is not None else float("inf")
    while order:
        node = order.popleft()
        for label, nxt in _product_succ(g, aut, node):
            if nxt not in parent:
                parent[nxt] = (node, label)
                if len(parent) > cap:
                    return Verdict(INCONCLUSIVE, reason=f"state cap of {max_states} product states reached",
                                   states=len(parent), configs=len(g.store))
                order.append(nxt)
            if not graph.has_edge(node, nxt):
                graph.add_edge(node, nxt, label=label)

    rank = {n: k for k, n in enumerate(parent)}
    best = None
    for comp in nx.strongly_connected_components(graph):
        if len(comp) == 1:
            (only,) = comp
            if not graph.has_edge(only, only):
                continue
        acc = [n for n in comp if n[1] in aut.accepting]
        if acc:
            cand = min(acc, key=rank.__getitem__)
            if best is None or rank[cand] < rank[best[0]]:
                best = (cand, comp)
    stats = dict(states=len(parent), configs=len(g.store))
    if best is None:
        return Verdict(HOLDS, **stats)

    a, comp = best
    prefix = []
    n = a
    while parent[n] is not None:
        prev, label = parent[n]
        prefix.append((label, n))
        n = prev
    prefix.append((None, n))
    prefix.reverse()
    cycle = _cycle_in(graph, comp, a)
    path = prefix + cycle
    return Verdict(VIOLATED, trace=_to_trace(g, path, len(prefix) - 1), **stats)


def _cycle_in(graph, comp, a) -> list:
    """Shortest cycle through ``a`` inside ``comp`` as ``[(label, node), ...]`` ending in ``a``."""
    back: dict = {}
    todo = deque()
    for nxt in graph.successors(a):
        if nxt in comp and nxt not in back:
            back[nxt] = None
            todo.append(nxt)
    while a not in back:
        n = todo.popleft()
        for nxt in graph.successors(n):
            if nxt in comp and nxt not in back:
                back[nxt] = n
                todo.append(nxt)
    path = []
    n = a
    while True:
        prev = back[n]
        src = a if prev is None else prev
        path.append((graph.edges[src, n]["label"], n))
        if prev is None:
            break
        n = prev
    path.reverse()
    return path
