# %% [markdown]
# # Level crossing walkthrough
#
# Load the bundled two-track crossing, check both properties, then cut the
# manager-to-barrier wire and look at the counterexample the checker finds.

# %%
from hetco import asset_path
from hetco.config import load_system
from hetco.verify import model_check, render_text, replay, simulate
from hetco.verify.search import explore

ls = load_system(asset_path("levelcrossing", "levelcrossing.system.json"))
props = ls.properties.propositions
print("instances:", [i.id for i in ls.system.instances])
print("horizon:", ls.system.horizon)

# %% [markdown]
# A single seeded run shows the sensor, the manager countdown and the barrier
# movement interleaved on the global clock.

# %%
run = simulate(ls.initial, seed=0)
print(render_text(run, props))

# %%
ex = explore(ls.initial)
print(f"{ex.states} configurations, {ex.transitions} transitions, clock {ex.min_clock}..{ex.max_clock}")

for name, formula in ls.properties.checks:
    v = model_check(ls.initial, formula, props)
    print(f"{name}: {v.status} ({v.states} product states)")

# %% [markdown]
# Without the `manager.traffic -> barrier.commands` binding the barrier never
# hears about approaching trains.

# %%
unwired = load_system(asset_path("levelcrossing", "unwired.system.json"))
v = model_check(unwired.initial, unwired.properties.check("safety"), props)
replay(v.trace)
print(v.status)
print(render_text(v.trace, props))
