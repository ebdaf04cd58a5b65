"""Time-bounded explicit-state verification."""

from .buchi import BuchiAutomaton, accepts_lasso, ltl_to_buchi
from .checker import HOLDS, INCONCLUSIVE, VIOLATED, StateStore, Verdict, brute_force_check, model_check
from .ltl import eval_on_lasso, nnf
from .search import StateCapExceeded, explore, reachability, simulate
from .trace import Step, Trace, dump_json, render_text, replay, replay_json

__all__ = [
    "BuchiAutomaton", "accepts_lasso", "ltl_to_buchi", "HOLDS", "INCONCLUSIVE", "VIOLATED", "StateStore",
    "Verdict", "brute_force_check", "model_check", "eval_on_lasso", "nnf", "StateCapExceeded", "explore",
    "reachability", "simulate", "Step", "Trace", "dump_json", "render_text", "replay", "replay_json",
]
