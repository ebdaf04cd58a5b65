"""System manifests (``system/v1``): models, instances with overrides, bindings, horizon.

::

    {
      "schema": "system/v1",
      "horizon": 20,
      "models": [{"id": "sensorNet", "language": "cpn", "path": "sensor.cpn.json"}],
      "instances": [{"id": "sensor", "model": "sensorNet",
                     "overrides": {"marking": {"New train can approach": [25, 40]}}}],
      "bindings": "levelcrossing.bind",
      "properties": "levelcrossing.prop"
    }

Paths are relative to the manifest. Overrides per language: ``{"marking":
{place: [token, ...]}}`` for nets, ``{"vars": {name: literal}}`` for
statecharts and ``{"initial": state}`` for LTS.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from ..kernel.errors import HetcoError
from ..kernel.system import GlobalConfig, Instance, System
from ..kernel.values import as_value
from .bindings import parse_bindings
from .diagnostics import ConfigError, Diagnostic
from .models import ADAPTERS, load_json, load_model, token_from_json
from .properties import PropertyFile, parse_properties

SCHEMA = "system/v1"


@dataclass
class LoadedSystem:
    system: System
    initial: GlobalConfig
    properties: PropertyFile | None = None
    diagnostics: list = field(default_factory=list)  # warnings only; errors raise
    path: Path | None = None


def _str_field(obj, key, where, diags, file):
    v = obj.get(key) if isinstance(obj, dict) else None
    if not isinstance(v, str) or not v:
        diags.append(Diagnostic("SchemaError", f"{where}: field {key!r} must be a non-empty string", file))
        return None
    return v


def _convert_overrides(language: str, model, overrides: dict, where: str, file) -> dict:
    """Turn JSON override values into the adapter's native form; raises ConfigError."""
    def bad(msg):
        raise ConfigError([Diagnostic("OverrideTypeError", f"{where}: {msg}", file)])

    if not isinstance(overrides, dict):
        bad("overrides must be an object")
    allowed = {"cpn": {"marking"}, "statechart": {"vars"}, "lts": {"initial"}}[language]
    extra = set(overrides) - allowed
    if extra:
        bad(f"unsupported override keys {sorted(extra)} for a {language} model")
    if language == "cpn" and "marking" in overrides:
        marking = {}
        for place, toks in overrides["marking"].items():
            try:
                sort = model.place(place).sort
            except KeyError:
                bad(f"marking names unknown place {place!r}")
            if not isinstance(toks, list):
                bad(f"marking of {place!r} must be a list")
            try:
                marking[place] = [token_from_json(t, sort, f"{where}.marking.{place}", file) for t in toks]
            except ConfigError as exc:
                bad(exc.diagnostics[0].message)
        return {"marking": marking}
    if language == "statechart" and "vars" in overrides:
        vs = overrides["vars"]
        if not isinstance(vs, dict):
            bad("'vars' must be an object")
        try:
            return {"vars": {k: as_value(v) for k, v in vs.items()}}
        except TypeError as exc:
            bad(str(exc))
    return dict(overrides)


def build_system(models: dict, instances: list, bindings: list, horizon, file=None, bindings_file=None,
                 broken_models=()):
    """Assemble and validate a system from parsed parts.

    ``models`` maps model id to ``(language, model)``; ``instances`` is a list of
    ``(instance id, model id, overrides)``. Returns ``(system, initial config,
    warnings)`` or raises ConfigError listing every error found. Instances of
    ``broken_models`` (already reported) are skipped without further diagnostics.
    """
    diags: list[Diagnostic] = []
    insts, states, seen = [], {}, set()
    skipped = set()
    for iid, mid, overrides in instances:
        if iid in seen:
            diags.append(Diagnostic("DuplicateId", f"instance id {iid!r} is declared twice", file))
            continue
        seen.add(iid)
        if mid not in models:
            skipped.add(iid)
            if mid not in broken_models:
                diags.append(Diagnostic("UnknownModel", f"instance {iid!r} refers to unknown model {mid!r}", file))
            continue
        language, model = models[mid]
        adapter = ADAPTERS[language](model)
        try:
            native = _convert_overrides(language, model, overrides or {}, f"instance {iid!r}", file)
            states[iid] = adapter.initial_state(native)
        except ConfigError as exc:
            diags.extend(exc.diagnostics)
        except (HetcoError, KeyError, TypeError) as exc:
            diags.append(Diagnostic("OverrideTypeError", f"instance {iid!r}: {exc}", file))
        insts.append(Instance(iid, language, adapter))
        if language == "statechart":
            for s in model.states:
                if s not in model.reachable_states():
                    diags.append(Diagnostic(
                        "UnreachableState",
                        f"state {s!r} of instance {iid!r} is unreachable from {model.initial!r}",
                        file, severity="warning",
                    ))
    by_id = {i.id: i for i in insts}
    seen_src = {}
    for b in bindings:
        ok = True
        for end, want in ((b.source, "out"), (b.target, "in")):
            inst = by_id.get(end.instance)
            if inst is None and end.instance in skipped:
                ok = False
                continue
            if inst is None:
                diags.append(Diagnostic("UnknownInstance", f"binding refers to unknown instance {end.instance!r}",
                                        bindings_file, b.line))
                ok = False
                continue
            d = inst.adapter.channel_direction(end.channel)
            if d is None:
                chans = ", ".join(c for c, _ in inst.adapter.channels()) or "none"
                diags.append(Diagnostic("UnknownChannel",
                                        f"instance {end.instance!r} has no channel {end.channel!r} (channels: {chans})",
                                        bindings_file, b.line))
                ok = False
            elif d != want:
                role = "source" if want == "out" else "target"
                diags.append(Diagnostic("DirectionMismatch",
                                        f"{role} {end} is an {d}-channel; a {role} must be an {want}-channel",
                                        bindings_file, b.line))
                ok = False
        if ok and b.source in seen_src:
            diags.append(Diagnostic("DuplicateSource", f"channel {b.source} is bound twice", bindings_file, b.line))
        seen_src.setdefault(b.source, b)
    try:
        h = Fraction(horizon) if not isinstance(horizon, bool) else None
    except (TypeError, ValueError):
        h = None
    if h is None or h < 0:
        diags.append(Diagnostic("SchemaError", f"horizon must be a non-negative number, got {horizon!r}", file))
    errors = [d for d in diags if d.severity == "error"]
    if errors:
        raise ConfigError(errors)
    system = System(insts, bindings, h)
    return system, system.initial(states), diags


def resolve_properties(pf: PropertyFile, system: System, file=None) -> list[Diagnostic]:
    """Diagnostics for propositions that do not fit the system's instances."""
    diags = []
    ids = {i.id for i in system.instances}
    for name, q in pf.propositions.items():
        line = pf.lines.get(name)
        if q.instance not in ids:
            diags.append(Diagnostic("UnknownInstance", f"proposition {name!r} refers to unknown instance {q.instance!r}",
                                    file, line))
            continue
        msg = system.adapter(q.instance).check_atom(q)
        if msg:
            diags.append(Diagnostic("UnresolvedAtom", f"proposition {name!r}: {msg}", file, line))
    return diags


def check_goal_atoms(props: dict, system: System) -> None:
    diags = resolve_properties(PropertyFile(dict(props)), system)
    if diags:
        raise ConfigError(diags)


def load_properties(path: str | Path, system: System) -> PropertyFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError([Diagnostic("FileError", f"cannot read file: {exc.strerror}", str(path))]) from None
    pf = parse_properties(text, str(path))
    diags = resolve_properties(pf, system, str(path))
    if diags:
        raise ConfigError(diags)
    return pf


def load_system(path: str | Path, with_properties: bool = True) -> LoadedSystem:
    path = Path(path)
    file = str(path)
    data = load_json(path)
    diags: list[Diagnostic] = []
    if not isinstance(data, dict) or data.get("schema") != SCHEMA:
        found = data.get("schema") if isinstance(data, dict) else None
        raise ConfigError([Diagnostic("SchemaError", f"expected schema {SCHEMA!r}, found {found!r}", file)])
    base = path.parent

    models, broken = {}, set()
    for k, md in enumerate(data.get("models") or []):
        mid = _str_field(md, "id", f"models[{k}]", diags, file)
        lang = _str_field(md, "language", f"models[{k}]", diags, file)
        mpath = _str_field(md, "path", f"models[{k}]", diags, file)
        if None in (mid, lang, mpath):
            continue
        if lang not in ADAPTERS:
            diags.append(Diagnostic("SchemaError", f"model {mid!r}: unknown language {lang!r}", file))
            continue
        if mid in models:
            diags.append(Diagnostic("DuplicateId", f"model id {mid!r} is declared twice", file))
            continue
        try:
            models[mid] = (lang, load_model(lang, base / mpath))
        except ConfigError as exc:
            broken.add(mid)
            diags.extend(exc.diagnostics)

    instances = []
    for k, idata in enumerate(data.get("instances") or []):
        iid = _str_field(idata, "id", f"instances[{k}]", diags, file)
        mid = _str_field(idata, "model", f"instances[{k}]", diags, file)
        if iid and mid:
            instances.append((iid, mid, idata.get("overrides") or {}))

    bindings, bfile = [], None
    bpath = data.get("bindings")
    if bpath is not None:
        if not isinstance(bpath, str):
            diags.append(Diagnostic("SchemaError", "'bindings' must be a path", file))
        else:
            bfile = str(base / bpath)
            try:
                bindings = parse_bindings((base / bpath).read_text(encoding="utf-8"), bfile)
            except OSError as exc:
                diags.append(Diagnostic("FileError", f"cannot read file: {exc.strerror}", bfile))
            except ConfigError as exc:
                diags.extend(exc.diagnostics)

    if "horizon" not in data:
        diags.append(Diagnostic("SchemaError", "missing field 'horizon'", file))
    if diags:
        # report model/build problems together where possible
        try:
            build_system(models, instances, bindings, data.get("horizon", 0), file, bfile, broken)
        except ConfigError as exc:
            diags.extend(d for d in exc.diagnostics if d not in diags)
        raise ConfigError(diags)
    system, initial, warnings = build_system(models, instances, bindings, data["horizon"], file, bfile)

    props = None
    ppath = data.get("properties")
    if with_properties and isinstance(ppath, str):
        props = load_properties(base / ppath, system)
    return LoadedSystem(system, initial, props, warnings, path)
