"""Random generators shared by the unit and acceptance suites."""

from __future__ import annotations

import random
from fractions import Fraction

from hetco import asset_path
from hetco.config import load_model, parse_bindings
from hetco.config.manifest import build_system
from hetco.kernel.adapter import InState, TokenCount, VarCmp
from hetco.kernel.broker import BindingSpec, ChannelRef, EventRename
from hetco.kernel.system import STUTTER, TICK, instantaneous_successors, tick
from hetco.lang.lts import LTSModel, LTSTransition
from hetco.verify.ltl import FALSE, TRUE, Always, And, Eventually, Implies, Next, Not, Or, Prop, Release, Until
from hetco.verify.search import explore

LC = "levelcrossing"

LC_PROPS = {
    "Barriers-open": InState("barrier", "Barrier open"),
    "Barriers-closed": InState("barrier", "Barrier closed"),
    "Train-passing": TokenCount("sensor", "Train passed", ">=", 1),
    "Busy": VarCmp("manager", "trains", ">", Fraction(0)),
    "Inbound": InState("manager", "Trains inbound"),
}


def lc_models():
    return {
        "sensorNet": ("cpn", load_model("cpn", asset_path(LC, "sensor.cpn.json"))),
        "crossingManager": ("statechart", load_model("statechart", asset_path(LC, "manager.sc.json"))),
        "barrierSystem": ("statechart", load_model("statechart", asset_path(LC, "barrier.sc.json"))),
    }


def lc_bindings():
    return parse_bindings(asset_path(LC, "levelcrossing.bind").read_text())


def crossing_system(speeds=(25, 40), buffer=3, horizon=20, drop=(), models=None):
    """The level crossing with chosen train speeds, safety buffer and horizon; ``drop`` removes bindings by index."""
    instances = [
        ("sensor", "sensorNet", {"marking": {"New train can approach": list(speeds)}}),
        ("manager", "crossingManager", {"vars": {"safetyBuffer": buffer}}),
        ("barrier", "barrierSystem", {}),
    ]
    bindings = [b for k, b in enumerate(lc_bindings()) if k not in drop]
    system, cfg0, _ = build_system(models or lc_models(), instances, bindings, horizon)
    return system, cfg0


def random_formula(rng: random.Random, names, depth: int):
    if depth <= 0 or rng.random() < 0.25:
        r = rng.random()
        if r < 0.08:
            return TRUE if rng.random() < 0.5 else FALSE
        return Prop(rng.choice(names))
    op = rng.choice(["not", "and", "or", "implies", "X", "F", "G", "U", "R"])
    sub = lambda: random_formula(rng, names, depth - 1)  # noqa: E731
    if op == "not":
        return Not(sub())
    if op == "X":
        return Next(sub())
    if op == "F":
        return Eventually(sub())
    if op == "G":
        return Always(sub())
    cls = {"and": And, "or": Or, "implies": Implies, "U": Until, "R": Release}[op]
    return cls(sub(), sub())


def random_lasso(rng: random.Random, names, max_prefix=4, max_cycle=4):
    letter = lambda: frozenset(n for n in names if rng.random() < 0.5)  # noqa: E731
    prefix = [letter() for _ in range(rng.randint(0, max_prefix))]
    cycle = [letter() for _ in range(rng.randint(1, max_cycle))]
    return prefix, cycle


def _random_lts(rng, name, out_ch, in_ch, events):
    n = rng.randint(2, 4)
    states = tuple(f"s{k}" for k in range(n))
    ts = []
    for s in states:
        for _ in range(rng.randint(0, 2)):
            t = rng.choice(states)
            kind = rng.choices(["tau", "emit", "receive"], [1, 2, 2])[0]
            if kind == "tau":
                ts.append(LTSTransition(s, t, "tau", "t"))
            elif kind == "emit":
                ts.append(LTSTransition(s, t, "emit", rng.choice(events), out_ch))
            else:
                ts.append(LTSTransition(s, t, "receive", rng.choice(events), in_ch))
    return LTSModel(name, states, "s0", ((out_ch, "out"), (in_ch, "in")), tuple(dict.fromkeys(ts)))


def random_lts_pair(rng: random.Random, cap: int = 3000, tries: int = 200):
    """Two random LTS wired in a ring, resampled until the reachable state space is finite and small.

    Returns ``(cfg0, props)``.
    """
    events = ["x", "y"]
    for _ in range(tries):
        a = _random_lts(rng, "A", "out", "in", events)
        b = _random_lts(rng, "B", "out", "in", events)
        transform = (EventRename("x", "y"),) if rng.random() < 0.3 else ()
        bindings = [
            BindingSpec(ChannelRef("a", "out"), ChannelRef("b", "in"), transform),
            BindingSpec(ChannelRef("b", "out"), ChannelRef("a", "in")),
        ]
        models = {"A": ("lts", a), "B": ("lts", b)}
        _, cfg0, _ = build_system(models, [("a", "A", {}), ("b", "B", {})], bindings, 0)
        if explore(cfg0, cap).complete:
            props = {}
            for inst, m in (("a", a), ("b", b)):
                for s in m.states[:2]:
                    props[f"{inst}_{s}"] = InState(inst, s)
            return cfg0, props
    raise RuntimeError("no finite LTS pair found")


def random_crossing(rng: random.Random, models=None):
    """A single-track crossing with random speed, buffer, horizon and possibly a missing binding."""
    speed = rng.choice([10, 20, 25, 40, 50])
    buffer = rng.choice([-10, -2, 0, 1, 3, 5])
    horizon = rng.choice([6, 10, 14, 20, 24])
    drop = () if rng.random() < 0.6 else (rng.randrange(3),)
    _, cfg0 = crossing_system((speed,), buffer, horizon, drop, models)
    return cfg0, dict(LC_PROPS)


def edge_invariant_violations(cfg, succs) -> list[str]:
    """Per-state kernel invariants: urgency trichotomy, clock discipline, buffer accounting, tick determinism."""
    bad = []
    kinds = [label.kind for label, _ in succs]
    inst = [k for k in kinds if k not in (TICK, STUTTER)]
    has = (bool(inst), TICK in kinds, STUTTER in kinds)
    if sum(has) != 1:
        bad.append(f"trichotomy broken: {kinds}")
    if (TICK in kinds or STUTTER in kinds) and len(succs) != 1:
        bad.append("tick/stutter must be the only successor")
    if TICK in kinds:
        again = tick(cfg)
        if again is None or again.canonical != succs[0][1].canonical:
            bad.append("tick is not deterministic")
        if instantaneous_successors(cfg):
            bad.append("tick enabled beside an instantaneous step")
    if STUTTER in kinds and (cfg.inbuf or cfg.outbuf):
        bad.append("stutter with pending packets")
    for label, nxt in succs:
        if nxt.clock < cfg.clock:
            bad.append(f"clock decreased on {label}")
        if nxt.clock > cfg.clock and label.kind != TICK:
            bad.append(f"clock advanced on non-tick {label}")
        if nxt.clock > nxt.horizon:
            bad.append("clock beyond horizon")
        din, dout = len(nxt.inbuf) - len(cfg.inbuf), len(nxt.outbuf) - len(cfg.outbuf)
        want = {"ingest": (1, 0), "move": (-1, 1), "deliver": (0, -1)}.get(label.kind, (0, 0))
        if (din, dout) != want:
            bad.append(f"buffer sizes changed by {(din, dout)} on {label}")
        if label.kind not in ("ingest", "move", "deliver") and (nxt.inbuf, nxt.outbuf) != (cfg.inbuf, cfg.outbuf):
            bad.append(f"buffers touched by {label}")
    return bad
