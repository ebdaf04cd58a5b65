"""Canonical data model, expressions, broker and the global transition relation."""

from .adapter import INFINITY, ActionLabel, Adapter, InState, TokenCount, VarCmp
from .broker import BindingSpec, ChannelRef, EventRename, EventSet, KeyRename, Packet, apply_transform
from .errors import (
    ConfigFault, DivisionByZero, EvalError, HetcoError, KeyCollision, MissingKey, NegativeDelay, NotEnabled,
    TypeMismatch, UnboundVariable,
)
from .expr import eval_expr, expr, parse_expr, to_source
from .system import (
    GlobalConfig, Instance, System, broker_deliver, broker_ingest, broker_move, eval_atom, fingerprint, mte_global,
    successors, tick,
)
from .values import VarMap, as_value, format_value

__all__ = [
    "INFINITY", "ActionLabel", "Adapter", "InState", "TokenCount", "VarCmp",
    "BindingSpec", "ChannelRef", "EventRename", "EventSet", "KeyRename", "Packet", "apply_transform",
    "ConfigFault", "DivisionByZero", "EvalError", "HetcoError", "KeyCollision", "MissingKey", "NegativeDelay",
    "NotEnabled", "TypeMismatch", "UnboundVariable",
    "eval_expr", "expr", "parse_expr", "to_source",
    "GlobalConfig", "Instance", "System", "broker_deliver", "broker_ingest", "broker_move", "eval_atom",
    "fingerprint", "mte_global", "successors", "tick",
    "VarMap", "as_value", "format_value",
]
