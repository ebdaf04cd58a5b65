"""LTL to Büchi automata by tableau expansion (negation normal form, on-the-fly node splitting).

The expansion yields a generalized automaton with one acceptance set per
``U`` subformula; a counter construction degeneralizes it to a single set.
States are labelled: a run visits ``q0 q1 ...`` while reading letters
``w0 w1 ...`` and must satisfy ``label(q_i)`` on ``w_i``. Edge labels are the
labels of their target states.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ltl import FALSE, And, Const, Formula, Next, Not, Or, Prop, Release, Until, nnf

_INIT = -1


@dataclass
class _Node:
    incoming: set
    new: list
    old: list = field(default_factory=list)
    nxt: list = field(default_factory=list)


@dataclass(frozen=True)
class BuchiAutomaton:
    labels: tuple  # per state: (must-hold frozenset, must-not-hold frozenset)
    initial: tuple
    succ: tuple  # per state: tuple of successor ids
    accepting: frozenset

    @property
    def nodes(self) -> range:
        return range(len(self.labels))

    @property
    def edges(self) -> list[tuple[int, int, frozenset, frozenset]]:
        return [(u, v, *self.labels[v]) for u in self.nodes for v in self.succ[u]]

    def admits(self, q: int, letter) -> bool:
        pos, neg = self.labels[q]
        return pos <= letter and not (neg & letter)


def _is_literal(f) -> bool:
    return isinstance(f, (Prop, Const)) or (isinstance(f, Not) and isinstance(f.arg, Prop))


def _contradicts(lit, old: list) -> bool:
    if lit == FALSE:
        return True
    if isinstance(lit, Prop):
        return Not(lit) in old
    if isinstance(lit, Not):
        return lit.arg in old
    return False


def _add(lst: list, *items) -> list:
    out = list(lst)
    for x in items:
        if x not in out:
            out.append(x)
    return out


def _expand(f: Formula) -> list[_Node]:
    done: list[_Node] = []
    index: dict = {}
    stack = [_Node({_INIT}, [f])]
    while stack:
        node = stack.pop()
        if not node.new:
            key = (frozenset(node.old), frozenset(node.nxt))
            if key in index:
                done[index[key]].incoming |= node.incoming
            else:
                index[key] = len(done)
                done.append(node)
                stack.append(_Node({len(done) - 1}, list(node.nxt)))
            continue
        eta = node.new.pop()
        if eta in node.old:
            stack.append(node)
            continue
        if _is_literal(eta):
            if not _contradicts(eta, node.old):
                node.old = _add(node.old, eta)
                stack.append(node)
        elif isinstance(eta, And):
            stack.append(_Node(node.incoming, _add(node.new, eta.left, eta.right), _add(node.old, eta), node.nxt))
        elif isinstance(eta, Next):
            stack.append(_Node(node.incoming, node.new, _add(node.old, eta), _add(node.nxt, eta.arg)))
        elif isinstance(eta, (Or, Until, Release)):
            if isinstance(eta, Or):
                first = (_add(node.new, eta.left), node.nxt)
                second = (_add(node.new, eta.right), node.nxt)
            elif isinstance(eta, Until):
                first = (_add(node.new, eta.left), _add(node.nxt, eta))
                second = (_add(node.new, eta.right), node.nxt)
            else:
                first = (_add(node.new, eta.right), _add(node.nxt, eta))
                second = (_add(node.new, eta.left, eta.right), node.nxt)
            old = _add(node.old, eta)
            stack.append(_Node(set(node.incoming), second[0], old, second[1]))
            stack.append(_Node(set(node.incoming), first[0], list(old), first[1]))
        else:
            raise TypeError(f"formula not in negation normal form: {eta!r}")
    return done


def _subformulas(f: Formula):
    out = []
    todo = [f]
    while todo:
        g = todo.pop()
        if g in out:
            continue
        out.append(g)
        if isinstance(g, (Not, Next)):
            todo.append(g.arg)
        elif isinstance(g, (And, Or, Until, Release)):
            todo.extend([g.right, g.left])
    return out


def _label(old: list) -> tuple[frozenset, frozenset]:
    pos = frozenset(x.name for x in old if isinstance(x, Prop))
    neg = frozenset(x.arg.name for x in old if isinstance(x, Not) and isinstance(x.arg, Prop))
    return pos, neg


def ltl_to_buchi(f: Formula) -> BuchiAutomaton:
    g = nnf(f)
    nodes = _expand(g)
    untils = [s for s in _subformulas(g) if isinstance(s, Until)]
    acc_sets = [{k for k, n in enumerate(nodes) if u not in n.old or u.right in n.old} for u in untils]
    succ = {k: [] for k in range(len(nodes))}
    init = []
    for k, n in enumerate(nodes):
        for src in sorted(n.incoming):
            if src == _INIT:
                init.append(k)
            else:
                succ[src].append(k)
    labels = [_label(n.old) for n in nodes]

    copies = max(1, len(acc_sets))
    accept_in = acc_sets if acc_sets else [set(range(len(nodes)))]
    ids: dict = {}
    order: list = []

    def state_id(key):
        if key not in ids:
            ids[key] = len(order)
            order.append(key)
        return ids[key]

    initial = [state_id((k, 0)) for k in init]
    out_succ: list = []
    i = 0
    while i < len(order):
        k, c = order[i]
        nc = (c + 1) % copies if k in accept_in[c] else c
        out_succ.append(tuple(state_id((m, nc)) for m in succ[k]))
        i += 1
    return BuchiAutomaton(
        labels=tuple(labels[k] for k, _ in order),
        initial=tuple(initial),
        succ=tuple(out_succ),
        accepting=frozenset(ids[(k, c)] for (k, c) in order if c == 0 and k in accept_in[0]),
    )


def accepts_lasso(aut: BuchiAutomaton, prefix: list, cycle: list) -> bool:
    """Whether the automaton has an accepting run on ``prefix · cycle^ω``."""
    letters = [frozenset(x) for x in prefix] + [frozenset(x) for x in cycle]
    n = len(letters)
    loop = len(prefix)

    def nxt(pos):
        return pos + 1 if pos + 1 < n else loop

    start = [(q, 0) for q in aut.initial if aut.admits(q, letters[0])]
    graph: dict = {}
    todo = list(start)
    seen = set(start)
    while todo:
        q, pos = todo.pop()
        p2 = nxt(pos)
        outs = [(r, p2) for r in aut.succ[q] if aut.admits(r, letters[p2])]
        graph[(q, pos)] = outs
        for s in outs:
            if s not in seen:
                seen.add(s)
                todo.append(s)
    for s in seen:
        if s[0] not in aut.accepting:
            continue
        stack = list(graph[s])
        visited = set()
        while stack:
            t = stack.pop()
            if t == s:
                return True
            if t in visited:
                continue
            visited.add(t)
            stack.extend(graph[t])
    return False
