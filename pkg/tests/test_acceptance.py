"""The nine acceptance criteria, each at its stated tolerance.

A summary with one PASS/FAIL line per criterion is printed at the end of the run.
"""

import io
import random
import string
import time
from fractions import Fraction

import pytest

from hetco import asset_path
from hetco.cli import main
from hetco.config import load_system
from hetco.kernel.errors import ConfigFault
from hetco.kernel.system import STUTTER, eval_atom, successors
from hetco.kernel.values import VarMap, same_value
from hetco.lang.cpn import RecordSort, Token, cpn_from_broker, cpn_to_broker
from hetco.lang.lts import lts_from_broker, lts_to_broker
from hetco.lang.statechart import sc_from_broker, sc_to_broker
from hetco.verify import accepts_lasso, brute_force_check, eval_on_lasso, ltl_to_buchi, model_check, replay, simulate
from hetco.verify.checker import HOLDS, VIOLATED
from hetco.verify.ltl import Not
from hetco.verify.search import explore
from hetco.verify.trace import letter_fn

from helpers import (
    edge_invariant_violations, lc_models, random_crossing, random_formula, random_lasso, random_lts_pair,
)

LC = "levelcrossing"


def manifest(name):
    return str(asset_path(LC, f"{name}.system.json"))


def run_cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def check(name, which):
    ls = load_system(manifest(name))
    return ls, model_check(ls.initial, ls.properties.check(which), ls.properties.propositions)


@pytest.mark.criterion(1, "two-track crossing satisfies the safety property")
def test_use_case_safety(report):
    start = time.perf_counter()
    code, out, _ = run_cli("check", manifest(LC), str(asset_path(LC, "levelcrossing.prop")), "--check", "safety")
    elapsed = time.perf_counter() - start
    _, v = check(LC, "safety")
    assert code == 0
    assert "safety: HOLDS" in out
    assert v.holds
    assert elapsed < 60
    assert v.states < 10**6
    report(f"HOLDS in {elapsed:.2f}s with {v.states} product states")


@pytest.mark.criterion(2, "two-track crossing satisfies the response property, horizon validated by simulation")
def test_use_case_response(report):
    ls = load_system(manifest(LC))
    props = ls.properties.propositions
    horizon = ls.system.horizon
    # the horizon must fall inside a quiescent window with the barriers open
    for seed in range(25):
        tr = simulate(ls.initial, seed, horizon)
        end = tr.final
        assert end.clock == horizon
        assert eval_atom(end, props["Barriers-open"])
    ex = explore(ls.initial)
    assert ex.complete and ex.max_clock == horizon
    at_horizon = _states_at(ls.initial, horizon)
    assert at_horizon and all(eval_atom(c, props["Barriers-open"]) for c in at_horizon)

    code, out, _ = run_cli("check", manifest(LC), str(asset_path(LC, "levelcrossing.prop")))
    _, v = check(LC, "response")
    assert code == 0
    assert "response: HOLDS" in out and "safety: HOLDS" in out
    assert v.holds
    report(f"HOLDS; {len(at_horizon)} states at t={horizon}, all with barriers open")


def _states_at(cfg0, clock):
    seen = {cfg0.canonical: cfg0}
    todo = [cfg0]
    hits = []
    while todo:
        cfg = todo.pop()
        if cfg.clock == clock:
            hits.append(cfg)
        for _, nxt in successors(cfg):
            if nxt.canonical not in seen:
                seen[nxt.canonical] = nxt
                todo.append(nxt)
    return hits


@pytest.mark.criterion(3, "removing the manager-to-barrier binding violates safety")
def test_falsification_unwired(report):
    ls, v = check("unwired", "safety")
    props = ls.properties.propositions
    assert v.violated
    replay(v.trace)
    prefix, cycle = v.trace.lasso_word(letter_fn(props))
    assert not eval_on_lasso(prefix, cycle, ls.properties.check("safety"))
    bad = [c for c in v.trace.configs()
           if eval_atom(c, props["Train-passing"]) and eval_atom(c, props["Barriers-open"])]
    assert bad
    k = v.trace.configs().index(bad[0])
    code, out, _ = run_cli("check", manifest("unwired"), "--check", "safety")
    assert code == 1
    assert "Barriers-open=true, Train-passing=true" in out
    report(f"VIOLATED; trace replays, violating state [{k}] at t={bad[0].clock}")


@pytest.mark.criterion(4, "removing the openBarrier rename violates the response property")
def test_falsification_noreopen(report):
    ls, v = check("noreopen", "response")
    assert v.violated
    replay(v.trace)
    prefix, cycle = v.trace.lasso_word(letter_fn(ls.properties.propositions))
    assert not eval_on_lasso(prefix, cycle, ls.properties.check("response"))
    code, _, _ = run_cli("check", manifest("noreopen"), "--check", "response")
    assert code == 1
    report(f"VIOLATED; lasso with {len(v.trace.prefix)} prefix and {len(v.trace.cycle)} cycle steps")


@pytest.mark.criterion(5, "single track holds safety with buffer 3 and violates it with buffer -10")
def test_buffer_sweep(report):
    _, ok = check("single", "safety")
    ls, bad = check("single-late", "safety")
    assert ok.holds
    assert bad.violated
    replay(bad.trace)
    props = ls.properties.propositions
    # simulation oracle: the late closing lets the train pass an open barrier at t=16
    hit = None
    for seed in range(10):
        for c in simulate(ls.initial, seed).configs():
            if eval_atom(c, props["Train-passing"]) and eval_atom(c, props["Barriers-open"]):
                hit = c
                break
        assert hit is not None
        assert hit.clock == 16
    manager = ls.initial.system.index("manager")
    close_in = [c.states[manager].env["closeIn"] for c in simulate(ls.initial, 0).configs()]
    assert Fraction(18) in close_in
    report("buffer 3 HOLDS, buffer -10 VIOLATED (open barrier at t=16, closeIn started at 18)")


@pytest.mark.criterion(6, "nested DFS agrees with the SCC oracle on random systems and formulas")
def test_oracle_equivalence(report):
    rng = random.Random(20261014)
    models = lc_models()
    systems = []
    for k in range(120):
        systems.append(random_lts_pair(rng) if k % 2 == 0 else random_crossing(rng, models))
    runs = agree = 0
    tally = {HOLDS: 0, VIOLATED: 0}
    for cfg0, props in systems:
        names = sorted(props)
        for _ in range(3):
            f = random_formula(rng, names, 4)
            a = model_check(cfg0, f, props)
            b = brute_force_check(cfg0, f, props)
            runs += 1
            agree += a.status == b.status
            tally[a.status] = tally.get(a.status, 0) + 1
            for v in (a, b):
                if v.violated:
                    replay(v.trace)
                    pre, cyc = v.trace.lasso_word(letter_fn(props))
                    assert not eval_on_lasso(pre, cyc, f)
    assert agree == runs
    assert tally[HOLDS] > 0 and tally[VIOLATED] > 0
    report(f"{agree}/{runs} agree over {len(systems)} systems ({tally[HOLDS]} hold, {tally[VIOLATED]} violated)")


@pytest.mark.criterion(7, "Buchi membership agrees with direct lasso evaluation")
def test_ltl_translation(report):
    rng = random.Random(7)
    names = ["p", "q", "r"]
    agree = 0
    for _ in range(1000):
        f = random_formula(rng, names, 4)
        prefix, cycle = random_lasso(rng, names)
        want = eval_on_lasso(prefix, cycle, f)
        got = accepts_lasso(ltl_to_buchi(f), prefix, cycle)
        neg = accepts_lasso(ltl_to_buchi(Not(f)), prefix, cycle)
        agree += (got == want) and (neg != want)
    assert agree == 1000
    report(f"{agree}/1000 pairs agree (formula and its negation)")


def _rand_value(rng, sort):
    if sort == "NUM":
        return Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 10**4))
    if sort == "BOOL":
        return rng.random() < 0.5
    alphabet = string.ascii_letters + string.digits + " _-éü中\U0001f686"
    return "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 12)))


def _rand_key(rng):
    return rng.choice(string.ascii_lowercase) + "".join(rng.choice(string.ascii_letters) for _ in range(rng.randint(0, 6)))


@pytest.mark.criterion(8, "fromBroker after toBroker is the identity on values for all three languages")
def test_adapter_round_trips(report):
    rng = random.Random(8)
    n = 10_000
    for _ in range(n):
        if rng.random() < 0.5:
            sort = rng.choice(["NUM", "BOOL", "STR"])
            value = _rand_value(rng, sort)
        else:
            keys = list(dict.fromkeys(_rand_key(rng) for _ in range(rng.randint(0, 4))))
            fields = tuple((k, rng.choice(["NUM", "BOOL", "STR"])) for k in keys)
            sort = RecordSort(fields)
            value = VarMap({k: _rand_value(rng, s) for k, s in fields})
        tok = Token(value, Fraction(rng.randint(0, 100)))
        now = Fraction(rng.randint(0, 100))
        back = cpn_from_broker(cpn_to_broker(tok), sort, now)
        assert same_value(back.value, value) and back.time == now
    for _ in range(n):
        name = _rand_key(rng)
        payload = VarMap({k: _rand_value(rng, rng.choice(["NUM", "BOOL", "STR"]))
                          for k in (_rand_key(rng) for _ in range(rng.randint(0, 4))) if k != "event"})
        assert sc_from_broker(sc_to_broker(name, payload)) == (name, payload)
    for _ in range(n):
        e = _rand_value(rng, "STR")
        assert lts_from_broker(lts_to_broker(e)) == e
    report(f"{3 * n} round trips ({n} per language), no mismatch")


@pytest.mark.criterion(9, "kernel invariants hold on randomly explored states")
def test_kernel_invariants(report):
    rng = random.Random(9)
    models = lc_models()
    sampled = 0
    violations = []
    fifo_checked = 0
    while sampled < 10_000:
        cfg0, _ = random_crossing(rng, models) if rng.random() < 0.7 else random_lts_pair(rng)
        cfg = cfg0
        ingested, moved, delivered = {}, set(), {}
        for _ in range(400):
            try:
                succs = successors(cfg)
            except ConfigFault:
                break
            sampled += 1
            violations += edge_invariant_violations(cfg, succs)
            label, nxt = succs[rng.randrange(len(succs))]
            if label.kind == "ingest":
                p = nxt.inbuf[-1]
                ingested.setdefault(p.binding, []).append(p.id)
            elif label.kind == "move":
                p = cfg.inbuf[0]
                if p.id in moved:
                    violations.append(f"packet {p.id} moved twice")
                moved.add(p.id)
            elif label.kind == "deliver":
                p = cfg.outbuf[0]
                delivered.setdefault(p.binding, []).append(p.id)
            if label.kind == STUTTER:
                break
            cfg = nxt
        for b, ids in delivered.items():
            fifo_checked += len(ids)
            if ids != ingested.get(b, [])[: len(ids)]:
                violations.append(f"binding {b}: delivered {ids} vs ingested {ingested.get(b)}")
            if len(set(ids)) != len(ids):
                violations.append(f"binding {b}: duplicate delivery")
        pending = {p.id for p in cfg.inbuf + cfg.outbuf}
        for b, ids in ingested.items():
            for i in ids:
                done = i in delivered.get(b, [])
                if not done and i not in pending:
                    violations.append(f"packet {i} vanished")
    assert not violations, violations[:5]
    report(f"{sampled} states sampled, {fifo_checked} deliveries order-checked, 0 violations")
