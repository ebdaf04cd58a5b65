import json
import shutil
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hetco import asset_path
from hetco.config import (
    ConfigError, load_model, load_system, parse_bindings, parse_model, parse_properties, serialize_bindings,
    serialize_model, serialize_properties,
)
from hetco.kernel.adapter import InState, TokenCount
from hetco.kernel.broker import BindingSpec, ChannelRef, EventRename, EventSet, KeyRename
from hetco.lang.cpn import Token
from hetco.verify.ltl import Always, Eventually, Implies, Not, And, Prop

LC = "levelcrossing"


def codes(exc_info):
    return exc_info.value.codes


@pytest.fixture
def workdir(tmp_path):
    for f in asset_path(LC).iterdir():
        if f.is_file():
            shutil.copy(f, tmp_path / f.name)
    return tmp_path


def edit_json(path, fn):
    data = json.loads(path.read_text())
    fn(data)
    path.write_text(json.dumps(data))


class TestBindings:
    def test_use_case_line(self):
        [b] = parse_bindings("sensor.TrainInbound -> manager.sensors with { key: value -> trainSpeed, event := trainInbound }")
        assert b.source == ChannelRef("sensor", "TrainInbound")
        assert b.target == ChannelRef("manager", "sensors")
        assert b.transform == (KeyRename("value", "trainSpeed"), EventSet("trainInbound"))

    def test_comments_and_blanks(self):
        assert parse_bindings("\n   \n# nothing here\n") == []

    def test_missing_arrow(self):
        with pytest.raises(ConfigError) as info:
            parse_bindings("\na.b b.c\n", file="x.bind")
        d = info.value.diagnostics[0]
        assert d.line == 2 and d.file == "x.bind" and d.code == "SyntaxError"

    def test_errors_are_collected(self):
        with pytest.raises(ConfigError) as info:
            parse_bindings("a.b b.c\nx.y -> \nok.a -> ok.b\n")
        assert [d.line for d in info.value.diagnostics] == [1, 2]

    def test_duplicate_source(self):
        with pytest.raises(ConfigError) as info:
            parse_bindings("sensor.TrainInbound -> a.b\nsensor.TrainInbound -> c.d\n")
        assert codes(info) == ["DuplicateSource"]

    def test_asset_round_trip(self):
        bs = parse_bindings(asset_path(LC, "levelcrossing.bind").read_text())
        assert len(bs) == 3
        again = parse_bindings(serialize_bindings(bs))
        assert [(b.source, b.target, b.transform) for b in again] == [(b.source, b.target, b.transform) for b in bs]


names = st.text(st.characters(blacklist_categories=("Cs", "Cc")), min_size=1, max_size=8)
refs = st.builds(ChannelRef, names, names)
rules = st.one_of(st.builds(KeyRename, names, names), st.builds(EventRename, names, names), st.builds(EventSet, names))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.builds(lambda s, t, r: BindingSpec(s, t, tuple(r)), refs, refs, st.lists(rules, max_size=4)),
                max_size=5, unique_by=lambda b: b.source))
def test_bindings_serialize_round_trip(bs):
    again = parse_bindings(serialize_bindings(bs))
    assert [(b.source, b.target, b.transform) for b in again] == [(b.source, b.target, b.transform) for b in bs]


class TestProperties:
    def test_property_one(self):
        pf = parse_properties('prop Barriers-open := in(barrier, "Barrier open")\n'
                              'prop Train-passing := tokens(sensor, "Train passed") >= 1\n'
                              "check safety : G !(Barriers-open && Train-passing)\n")
        assert pf.propositions["Barriers-open"] == InState("barrier", "Barrier open")
        assert pf.propositions["Train-passing"] == TokenCount("sensor", "Train passed", ">=", 1)
        assert pf.check("safety") == Always(Not(And(Prop("Barriers-open"), Prop("Train-passing"))))

    def test_property_two(self):
        pf = parse_properties('prop Barriers-open := in(barrier, "Barrier open")\n'
                              'prop Barriers-closed := in(barrier, "Barrier closed")\n'
                              "check resp : G (Barriers-closed -> F Barriers-open)\n")
        assert pf.check("resp") == Always(Implies(Prop("Barriers-closed"), Eventually(Prop("Barriers-open"))))

    def test_unknown_proposition(self):
        with pytest.raises(ConfigError) as info:
            parse_properties("check bad : G Unknown\n")
        assert codes(info) == ["UnknownProposition"]

    def test_asset_round_trip(self):
        pf = parse_properties(asset_path(LC, "levelcrossing.prop").read_text())
        again = parse_properties(serialize_properties(pf))
        assert again.propositions == pf.propositions and again.checks == pf.checks

    def test_var_comparison_atom(self):
        pf = parse_properties("prop busy := var(manager, trains) > 0\ncheck c : F busy\n")
        q = pf.propositions["busy"]
        assert (q.instance, q.var, q.cmp, q.value) == ("manager", "trains", ">", Fraction(0))


class TestModels:
    @pytest.mark.parametrize("lang,name", [("cpn", "sensor.cpn.json"), ("statechart", "manager.sc.json"),
                                           ("statechart", "barrier.sc.json")])
    def test_asset_round_trip(self, lang, name):
        m = load_model(lang, asset_path(LC, name))
        assert parse_model(lang, serialize_model(lang, m)) == m

    def test_sensor_defaults(self):
        m = load_model("cpn", asset_path(LC, "sensor.cpn.json"))
        assert dict(m.initial)["New train can approach"] == (Token(Fraction(25), Fraction(0)), Token(Fraction(40), Fraction(0)))

    def test_bad_json(self):
        with pytest.raises(ConfigError) as info:
            parse_model("cpn", '{"schema": "cpn/v1", "name": ', "broken.json")
        assert codes(info) == ["SyntaxError"]

    def test_wrong_schema(self):
        with pytest.raises(ConfigError) as info:
            parse_model("cpn", json.dumps({"schema": "statechart/v1"}))
        assert codes(info) == ["SchemaError"]

    def test_bad_expression_is_located(self):
        doc = json.loads(asset_path(LC, "barrier.sc.json").read_text())
        doc["transitions"][1]["trigger"] = {"after": "2 +"}
        with pytest.raises(ConfigError) as info:
            parse_model("statechart", json.dumps(doc), "b.json")
        assert codes(info) == ["ExprSyntaxError"]

    def test_lts_round_trip(self):
        text = json.dumps({"schema": "lts/v1", "name": "p", "states": ["a", "b"], "initial": "a",
                           "channels": [{"name": "out", "dir": "out"}],
                           "transitions": [{"from": "a", "to": "b", "emit": "out.ping"},
                                           {"from": "b", "to": "a", "tau": "back"}]})
        m = parse_model("lts", text)
        assert parse_model("lts", serialize_model("lts", m)) == m


class TestManifest:
    def test_bundled_system(self):
        ls = load_system(asset_path(LC, "levelcrossing.system.json"))
        assert sorted(i.id for i in ls.system.instances) == ["barrier", "manager", "sensor"]
        assert len(ls.system.bindings) == 3
        assert ls.initial.clock == 0
        assert ls.initial.state_of("sensor").tokens("New train can approach") == (
            Token(Fraction(25), Fraction(0)), Token(Fraction(40), Fraction(0)))
        assert ls.diagnostics == []
        assert [n for n, _ in ls.properties.checks] == ["safety", "response"]

    def test_loading_is_deterministic(self):
        a = load_system(asset_path(LC, "levelcrossing.system.json"))
        b = load_system(asset_path(LC, "levelcrossing.system.json"))
        assert a.initial.fingerprint == b.initial.fingerprint

    def test_unknown_channel(self, workdir):
        (workdir / "levelcrossing.bind").write_text("manager.traffic -> barrier.nopool\n")
        with pytest.raises(ConfigError) as info:
            load_system(workdir / "levelcrossing.system.json")
        assert codes(info) == ["UnknownChannel"]
        assert info.value.diagnostics[0].line == 1

    def test_unknown_instance(self, workdir):
        (workdir / "levelcrossing.bind").write_text("ghost.out -> barrier.commands\n")
        with pytest.raises(ConfigError) as info:
            load_system(workdir / "levelcrossing.system.json")
        assert codes(info) == ["UnknownInstance"]

    def test_direction_mismatch(self, workdir):
        (workdir / "levelcrossing.bind").write_text("barrier.commands -> manager.sensors\n")
        with pytest.raises(ConfigError) as info:
            load_system(workdir / "levelcrossing.system.json")
        assert "DirectionMismatch" in codes(info)

    def test_duplicate_source(self, workdir):
        (workdir / "levelcrossing.bind").write_text(
            "sensor.TrainInbound -> manager.sensors\nsensor.TrainInbound -> manager.sensors\n")
        with pytest.raises(ConfigError) as info:
            load_system(workdir / "levelcrossing.system.json")
        assert codes(info) == ["DuplicateSource"]

    def test_override_type_error(self, workdir):
        edit_json(workdir / "levelcrossing.system.json",
                  lambda d: d["instances"][1]["overrides"]["vars"].update(safetyBuffer="three"))
        with pytest.raises(ConfigError) as info:
            load_system(workdir / "levelcrossing.system.json")
        assert codes(info) == ["OverrideTypeError"]

    def test_unknown_model(self, workdir):
        edit_json(workdir / "levelcrossing.system.json", lambda d: d["instances"][2].update(model="nope"))
        with pytest.raises(ConfigError) as info:
            load_system(workdir / "levelcrossing.system.json")
        assert codes(info) == ["UnknownModel"]

    def test_duplicate_instance(self, workdir):
        edit_json(workdir / "levelcrossing.system.json", lambda d: d["instances"][2].update(id="sensor"))
        with pytest.raises(ConfigError) as info:
            load_system(workdir / "levelcrossing.system.json")
        assert "DuplicateId" in codes(info)

    def test_missing_file(self, workdir):
        (workdir / "barrier.sc.json").unlink()
        with pytest.raises(ConfigError) as info:
            load_system(workdir / "levelcrossing.system.json")
        assert codes(info) == ["FileError"]

    def test_unreachable_state_is_a_warning(self, workdir):
        doc = json.loads((workdir / "barrier.sc.json").read_text())
        doc["states"].append("Broken")
        (workdir / "barrier.sc.json").write_text(json.dumps(doc))
        ls = load_system(workdir / "levelcrossing.system.json")
        assert [(d.code, d.severity) for d in ls.diagnostics] == [("UnreachableState", "warning")]

    def test_unresolved_atom(self, workdir):
        (workdir / "levelcrossing.prop").write_text('prop p := in(barrier, "Nowhere")\ncheck c : G p\n')
        with pytest.raises(ConfigError) as info:
            load_system(workdir / "levelcrossing.system.json")
        assert codes(info) == ["UnresolvedAtom"]

    def test_errors_carry_file_and_line(self, workdir):
        (workdir / "levelcrossing.bind").write_text("# header\nmanager.traffic -> barrier.nopool\n")
        with pytest.raises(ConfigError) as info:
            load_system(workdir / "levelcrossing.system.json")
        d = info.value.diagnostics[0]
        assert d.file.endswith("levelcrossing.bind") and d.line == 2
        assert str(d).startswith(d.file + ":2")
