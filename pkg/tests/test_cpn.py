from fractions import Fraction

import pytest

from hetco import asset_path
from hetco.config import load_model
from hetco.kernel.adapter import INFINITY, TokenCount
from hetco.kernel.errors import MissingKey, NegativeDelay, NotEnabled, TypeMismatch
from hetco.kernel.expr import Lit, Var, parse_expr
from hetco.kernel.values import VarMap
from hetco.lang.cpn import (
    Arc, CPNAdapter, CPNBinding, CPNModel, CPNState, Place, RecordSort, Token, Transition, cpn_from_broker, cpn_mte,
    cpn_to_broker, default_channel_name, enabled_bindings, fire, make_marking,
)

F = Fraction


@pytest.fixture(scope="module")
def sensor():
    return load_model("cpn", asset_path("levelcrossing", "sensor.cpn.json"))


def test_two_bindings_for_the_two_speeds(sensor):
    m = make_marking({"New train can approach": [Token(F(25), F(0)), Token(F(40), F(0))]})
    bs = enabled_bindings(sensor, m, F(0))
    assert [(b.transition, b.env["v"]) for b in bs] == [("Inbound train measured", 25), ("Inbound train measured", 40)]


def test_timestamp_gating(sensor):
    m = make_marking({"New train can approach": [Token(F(25), F(10))]})
    assert enabled_bindings(sensor, m, F(5)) == []
    assert len(enabled_bindings(sensor, m, F(10))) == 1
    assert enabled_bindings(sensor, (), F(0)) == []


def test_identical_tokens_collapse(sensor):
    m = make_marking({"New train can approach": [Token(F(25), F(0))] * 3})
    assert len(enabled_bindings(sensor, m, F(0))) == 1
    assert CPNState(m).count("New train can approach") == 3


def test_fire_inbound_produces_port_and_corridor_tokens(sensor):
    m = make_marking({"New train can approach": [Token(F(25), F(0)), Token(F(40), F(0))]})
    b = [b for b in enabled_bindings(sensor, m, F(0)) if b.env["v"] == 40][0]
    after = CPNState(fire(sensor, m, b, F(0)))
    assert after.tokens("Train inbound") == (Token(F(40), F(0)),)
    assert after.tokens("Train in corridor") == (Token(F(40), F(10)),)
    assert after.tokens("New train can approach") == (Token(F(25), F(0)),)
    assert after.size() == CPNState(m).size() - 1 + 2


def test_zero_delay_keeps_now(sensor):
    m = make_marking({"Train in corridor": [Token(F(40), F(3))]})
    b = enabled_bindings(sensor, m, F(7))[0]
    after = CPNState(fire(sensor, m, b, F(7)))
    assert after.tokens("Train passed") == (Token(F(40), F(7)),)


def test_cooldown_delay_of_ten(sensor):
    m = make_marking({"New train waiting to approach": [Token(F(25), F(16))]})
    b = enabled_bindings(sensor, m, F(16))[0]
    assert CPNState(fire(sensor, m, b, F(16))).tokens("New train can approach") == (Token(F(25), F(26)),)


def test_fire_disabled_binding(sensor):
    m = make_marking({"New train can approach": [Token(F(25), F(0))]})
    ghost = CPNBinding("Inbound train measured", VarMap({"v": F(99)}), (("New train can approach", Token(F(99), F(0))),))
    with pytest.raises(NotEnabled):
        fire(sensor, m, ghost, F(0))


def _one_step_net(delay, sort="NUM", inscription=None):
    return CPNModel(
        "n",
        (Place("a", "NUM"), Place("b", sort)),
        (Transition("t", Lit(True), delay),),
        (Arc("a", "t", "in", Var("x")), Arc("b", "t", "out", inscription or Var("x"))),
    )


def test_negative_delay():
    net = _one_step_net(parse_expr("x - 5"))
    m = make_marking({"a": [Token(F(1), F(0))]})
    with pytest.raises(NegativeDelay):
        fire(net, m, enabled_bindings(net, m, F(0))[0], F(0))


def test_produced_token_must_match_sort():
    net = _one_step_net(Lit(F(0)), sort="BOOL")
    m = make_marking({"a": [Token(F(1), F(0))]})
    with pytest.raises(TypeMismatch):
        fire(net, m, enabled_bindings(net, m, F(0))[0], F(0))


def test_guards_and_literal_patterns():
    net = CPNModel(
        "g",
        (Place("a"), Place("b")),
        (Transition("big", parse_expr("x > 10")), Transition("seven")),
        (Arc("a", "big", "in", Var("x")), Arc("b", "big", "out", Var("x")),
         Arc("a", "seven", "in", Lit(F(7))), Arc("b", "seven", "out", Lit(F(0)))),
    )
    m = make_marking({"a": [Token(F(7), F(0)), Token(F(12), F(0))]})
    got = sorted((b.transition, tuple(b.env.items())) for b in enabled_bindings(net, m, F(0)))
    assert got == [("big", (("x", F(12)),)), ("seven", ())]


def test_mte_examples():
    m = make_marking({"x": [Token(F(1), F(10)), Token(F(2), F(16))]})
    assert cpn_mte(m, F(0)) == 10
    assert cpn_mte(make_marking({"x": [Token(F(1), F(16))]}), F(10)) == 6
    assert cpn_mte(m, F(20)) == INFINITY


def test_broker_translation():
    assert cpn_to_broker(Token(F(25), F(0))) == VarMap({"value": F(25)})
    assert cpn_from_broker(VarMap({"value": F(25)}), "NUM", F(3)) == Token(F(25), F(3))
    with pytest.raises(MissingKey) as info:
        cpn_from_broker(VarMap({"wrong": F(25)}), "NUM", F(0))
    assert "value" in str(info.value)
    with pytest.raises(TypeMismatch):
        cpn_from_broker(VarMap({"value": "fast"}), "NUM", F(0))
    rec = RecordSort((("id", "STR"), ("speed", "NUM")))
    data = VarMap({"id": "t1", "speed": F(30)})
    assert cpn_from_broker(cpn_to_broker(Token(data, F(0))), rec, F(1)) == Token(data, F(1))
    with pytest.raises(MissingKey):
        cpn_from_broker(VarMap({"id": "t1"}), rec, F(0))


def test_adapter_ports_and_deliver(sensor):
    a = CPNAdapter(sensor)
    assert sorted(a.channels()) == [("TrainInbound", "out"), ("TrainPassed", "out")]
    st = CPNState(make_marking({"Train inbound": [Token(F(25), F(0)), Token(F(40), F(5))]}))
    offers = a.ingest_offer(st, "TrainInbound", F(0))
    assert [data for _, data, _ in offers] == [VarMap({"value": F(25)})]
    assert offers[0][2].count("Train inbound") == 1
    with pytest.raises(Exception):
        a.deliver(st, "TrainInbound", VarMap({"value": F(1)}), F(0))


def test_deliver_into_in_port():
    net = CPNModel("in", (Place("Cmd in", "NUM", "in"),), (), ())
    a = CPNAdapter(net)
    assert a.channels() == [("CmdIn", "in")]
    st = a.deliver(a.initial_state(), "CmdIn", VarMap({"value": F(4)}), F(9))
    assert st.tokens("Cmd in") == (Token(F(4), F(9)),)


def test_atoms(sensor):
    a = CPNAdapter(sensor)
    st = a.initial_state()
    assert a.eval_atom(st, TokenCount("sensor", "New train can approach", "==", 2))
    assert not a.eval_atom(st, TokenCount("sensor", "Train passed", ">=", 1))
    assert a.check_atom(TokenCount("sensor", "Nowhere", ">=", 1))


def test_default_channel_names():
    assert default_channel_name("Train inbound") == "TrainInbound"
    assert default_channel_name("train passed") == "TrainPassed"


def test_model_validation():
    from hetco.lang.cpn import CPNModelError

    with pytest.raises(CPNModelError):
        CPNModel("bad", (Place("a"),), (Transition("t"),), (Arc("zzz", "t", "in", Var("x")),))
    with pytest.raises(CPNModelError):
        CPNModel("dup", (Place("a"), Place("a")), (), ())
