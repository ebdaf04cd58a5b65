"""Traces through the coordinated transition system: replay, text rendering, JSON."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..kernel.adapter import AtomQuery
from ..kernel.errors import HetcoError
from ..kernel.system import GlobalConfig, eval_atom, successors
from ..kernel.values import format_value

SCHEMA = "trace/v1"


class TraceError(HetcoError):
    pass


@dataclass(frozen=True)
class Step:
    label: object  # ActionLabel
    cfg: GlobalConfig


@dataclass
class Trace:
    """``start`` followed by ``prefix`` steps; a non-empty ``cycle`` returns to the last prefix state."""

    start: GlobalConfig
    prefix: list = field(default_factory=list)
    cycle: list = field(default_factory=list)

    @property
    def is_lasso(self) -> bool:
        return bool(self.cycle)

    @property
    def loop_state(self) -> GlobalConfig:
        return self.prefix[-1].cfg if self.prefix else self.start

    @property
    def final(self) -> GlobalConfig:
        return self.loop_state

    def configs(self) -> list[GlobalConfig]:
        return [self.start] + [s.cfg for s in self.prefix] + [s.cfg for s in self.cycle]

    def steps(self) -> list[Step]:
        return list(self.prefix) + list(self.cycle)

    def __len__(self):
        return len(self.prefix) + len(self.cycle)

    def lasso_word(self, letter) -> tuple[list, list]:
        """Atom letters of the infinite run: prefix states, then the repeating cycle states."""
        if not self.cycle:
            raise ValueError("not a lasso")
        pre = [self.start] + [s.cfg for s in self.prefix]
        cyc = [pre.pop()] + [s.cfg for s in self.cycle[:-1]]
        return [letter(c) for c in pre], [letter(c) for c in cyc]


def replay(trace: Trace) -> None:
    """Check that every step is a kernel successor of its predecessor; raises TraceError otherwise."""
    cur = trace.start
    for k, step in enumerate(trace.steps()):
        for label, nxt in successors(cur):
            if label == step.label and nxt.canonical == step.cfg.canonical:
                break
        else:
            raise TraceError(f"step {k + 1} ({step.label}) is not a successor of the previous state")
        cur = step.cfg
    if trace.cycle and cur.canonical != trace.loop_state.canonical:
        raise TraceError("cycle does not return to its first state")


def valuation(cfg: GlobalConfig, props: dict) -> dict:
    return {name: eval_atom(cfg, q) for name, q in props.items()}


def _changed(prev: GlobalConfig | None, cfg: GlobalConfig) -> list[str]:
    ids = [i.id for i in cfg.system.instances]
    if prev is None:
        return ids
    return [iid for k, iid in enumerate(ids) if prev.states[k] != cfg.states[k]]


def _broker_summary(cfg: GlobalConfig) -> str | None:
    if not cfg.inbuf and not cfg.outbuf:
        return None
    def pk(p):
        return f"{p.channel}{{" + ", ".join(f"{k}: {format_value(v)}" for k, v in p.data.items()) + "}"
    return f"in=[{', '.join(pk(p) for p in cfg.inbuf)}] out=[{', '.join(pk(p) for p in cfg.outbuf)}]"


def _fmt_atoms(vals: dict) -> str:
    return ", ".join(f"{k}={'true' if v else 'false'}" for k, v in vals.items())


def render_text(trace: Trace, props: dict | None = None) -> str:
    props = props or {}
    lines = []
    prev = None
    loop_at = len(trace.prefix) if trace.cycle else None
    entries = [(None, trace.start)] + [(s.label, s.cfg) for s in trace.steps()]
    for k, (label, cfg) in enumerate(entries):
        if loop_at is not None and k == loop_at + 1:
            lines.append("-- cycle: the following steps repeat forever --")
        head = f"[{k}] t={format_value(cfg.clock)}"
        if prev is not None:
            head += f" (+{format_value(cfg.clock - prev.clock)})"
        head += "  " + ("initial state" if label is None else str(label))
        lines.append(head)
        for iid in _changed(prev, cfg):
            lines.append(f"    {iid}: {cfg.system.adapter(iid).describe(cfg.state_of(iid))}")
        b = _broker_summary(cfg)
        if b and (prev is None or (prev.inbuf, prev.outbuf) != (cfg.inbuf, cfg.outbuf)):
            lines.append(f"    broker: {b}")
        if props:
            lines.append(f"    atoms: {_fmt_atoms(valuation(cfg, props))}")
        prev = cfg
    if loop_at is not None:
        lines.append(f"-- back to state [{loop_at}] --")
    return "\n".join(lines) + "\n"


def to_json(trace: Trace, props: dict | None = None) -> dict:
    props = props or {}
    steps = []
    prev = None
    entries = [(None, trace.start)] + [(s.label, s.cfg) for s in trace.steps()]
    for k, (label, cfg) in enumerate(entries):
        steps.append({
            "index": k,
            "label": None if label is None else str(label),
            "clock": format_value(cfg.clock),
            "delta": format_value(cfg.clock - prev.clock) if prev is not None else "0",
            "fingerprint": cfg.fingerprint.hex(),
            "changed": {iid: cfg.system.adapter(iid).describe(cfg.state_of(iid)) for iid in _changed(prev, cfg)},
            "atoms": valuation(cfg, props),
        })
        prev = cfg
    return {
        "schema": SCHEMA,
        "kind": "lasso" if trace.cycle else "path",
        "loop_start": len(trace.prefix) if trace.cycle else None,
        "steps": steps,
    }


def dump_json(trace: Trace, props: dict | None = None) -> str:
    return json.dumps(to_json(trace, props), indent=2, ensure_ascii=False) + "\n"


def replay_json(doc, cfg0: GlobalConfig) -> Trace:
    """Rebuild a trace from its JSON form by following labels and fingerprints from ``cfg0``."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    if doc.get("schema") != SCHEMA:
        raise TraceError(f"expected schema {SCHEMA!r}")
    steps = doc["steps"]
    if not steps or steps[0]["fingerprint"] != cfg0.fingerprint.hex():
        raise TraceError("initial fingerprint does not match the system")
    cur = cfg0
    out = []
    for entry in steps[1:]:
        for label, nxt in successors(cur):
            if str(label) == entry["label"] and nxt.fingerprint.hex() == entry["fingerprint"]:
                out.append(Step(label, nxt))
                cur = nxt
                break
        else:
            raise TraceError(f"step {entry['index']} ({entry['label']}) cannot be replayed")
    loop = doc.get("loop_start")
    if loop is None:
        return Trace(cfg0, out, [])
    return Trace(cfg0, out[:loop], out[loop:])


def letter_fn(props: dict[str, AtomQuery]):
    """Letter of a configuration: names of the propositions that hold in it."""
    items = tuple(props.items())

    def letter(cfg: GlobalConfig) -> frozenset:
        return frozenset(name for name, q in items if eval_atom(cfg, q))

    return letter
