# %% [markdown]
# # Safety buffer sweep
#
# The manager closes the barrier `200 / speed - safetyBuffer` seconds after a
# train is reported. Sweep the buffer for a single train at speed 25 and see
# where the safety property starts to fail.

# %%
from hetco import asset_path
from hetco.config import load_model, parse_bindings, parse_properties
from hetco.config.manifest import build_system, resolve_properties
from hetco.kernel.system import eval_atom
from hetco.verify import model_check

LC = "levelcrossing"
models = {
    "sensorNet": ("cpn", load_model("cpn", asset_path(LC, "sensor.cpn.json"))),
    "crossingManager": ("statechart", load_model("statechart", asset_path(LC, "manager.sc.json"))),
    "barrierSystem": ("statechart", load_model("statechart", asset_path(LC, "barrier.sc.json"))),
}
bindings = parse_bindings(asset_path(LC, "levelcrossing.bind").read_text())
pf = parse_properties(asset_path(LC, "levelcrossing.prop").read_text())


def crossing(buffer):
    instances = [
        ("sensor", "sensorNet", {"marking": {"New train can approach": [25]}}),
        ("manager", "crossingManager", {"vars": {"safetyBuffer": buffer}}),
        ("barrier", "barrierSystem", {}),
    ]
    system, cfg0, _ = build_system(models, instances, bindings, 20)
    assert not resolve_properties(pf, system)
    return cfg0


# %%
for buffer in [5, 3, 0, -2, -6, -7, -8, -10]:
    v = model_check(crossing(buffer), pf.check("safety"), pf.propositions)
    line = f"buffer {buffer:>3}: {v.status}"
    if v.violated:
        bad = next(c for c in v.trace.configs()
                   if eval_atom(c, pf.propositions["Train-passing"]) and eval_atom(c, pf.propositions["Barriers-open"]))
        line += f" (train passes an open barrier at t={bad.clock})"
    print(line)

# %% [markdown]
# The barrier leaves "Barrier open" as soon as the close command arrives, at
# `8 - buffer`. The train exits the corridor at 16, so the property holds while
# `buffer > -8`; at exactly -8 both happen at t=16 and the interleaving that
# lets the train go first is a counterexample.
