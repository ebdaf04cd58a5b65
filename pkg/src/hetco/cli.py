"""Command-line front end: ``hetco validate|simulate|explore|check|reach``.

Exit codes: 0 success (all checks hold), 1 a check is violated, 2 usage,
parse or validation error, 3 inconclusive because the state cap was reached.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from .config.diagnostics import ConfigError
from .config.manifest import check_goal_atoms, load_properties, load_system
from .config.properties import parse_goal
from .kernel.errors import ConfigFault, HetcoError
from .kernel.values import format_value
from .verify.checker import default_max_states, model_check
from .verify.ltl import Always, atoms, is_temporal
from .verify.search import StateCapExceeded, explore, holds_in, reachability, simulate
from .verify.trace import dump_json, letter_fn, render_text, valuation

EXIT_OK, EXIT_VIOLATED, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2, 3


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hetco", description="Coordinate and verify heterogeneous behavioural models.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="load a system manifest and report diagnostics")
    v.add_argument("manifest")

    s = sub.add_parser("simulate", help="run one seeded random execution")
    s.add_argument("manifest")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--until", type=_fraction, default=None, help="stop once the clock reaches this time (default: horizon)")
    s.add_argument("--max-steps", type=int, default=100_000)
    s.add_argument("--trace", metavar="FILE", help="also write the run as a JSON trace")

    e = sub.add_parser("explore", help="enumerate the reachable state space")
    e.add_argument("manifest")
    e.add_argument("--max-states", type=int, default=None)

    c = sub.add_parser("check", help="model-check LTL properties")
    c.add_argument("manifest")
    c.add_argument("properties", nargs="?", help="property file (default: the one named in the manifest)")
    c.add_argument("--check", dest="only", metavar="NAME", help="run only this check")
    c.add_argument("--max-states", type=int, default=None)
    c.add_argument("--trace-format", choices=("text", "json"), default="text")

    r = sub.add_parser("reach", help="shortest trace to a state satisfying a propositional goal")
    r.add_argument("manifest")
    r.add_argument("goal", help='e.g. \'in(barrier, "Barrier closed")\' or a proposition name')
    r.add_argument("properties", nargs="?")
    r.add_argument("--max-states", type=int, default=None)
    r.add_argument("--trace-format", choices=("text", "json"), default="text")
    return p


def _load(args, out, err, with_properties=True):
    ls = load_system(args.manifest, with_properties=with_properties)
    for d in ls.diagnostics:
        print(str(d), file=err)
    return ls


def _props(args, ls):
    if getattr(args, "properties", None):
        return load_properties(args.properties, ls.system)
    return ls.properties


def _cmd_validate(args, out, err):
    ls = _load(args, out, err)
    sysm = ls.system
    print(f"{args.manifest}: ok", file=out)
    print(f"  instances: {len(sysm.instances)} ({', '.join(f'{i.id}:{i.language}' for i in sysm.instances)})", file=out)
    print(f"  bindings: {len(sysm.bindings)}", file=out)
    print(f"  horizon: {format_value(sysm.horizon)}", file=out)
    if ls.properties is not None:
        print(f"  checks: {', '.join(n for n, _ in ls.properties.checks) or 'none'}", file=out)
    print(f"  initial fingerprint: {ls.initial.fingerprint.hex()}", file=out)
    return EXIT_OK


def _cmd_simulate(args, out, err):
    ls = _load(args, out, err)
    if args.until is not None and args.until > ls.system.horizon:
        print(f"error: --until {format_value(args.until)} exceeds the horizon {format_value(ls.system.horizon)}", file=err)
        return EXIT_ERROR
    props = ls.properties.propositions if ls.properties else {}
    trace = simulate(ls.initial, args.seed, args.until, args.max_steps)
    out.write(render_text(trace, props))
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write(dump_json(trace, props))
    return EXIT_OK


def _cmd_explore(args, out, err):
    ls = _load(args, out, err, with_properties=False)
    cap = args.max_states if args.max_states is not None else default_max_states()
    ex = explore(ls.initial, cap)
    print(f"states: {ex.states}", file=out)
    print(f"transitions: {ex.transitions}", file=out)
    print(f"clock range: {format_value(ex.min_clock)} .. {format_value(ex.max_clock)}", file=out)
    print(f"stutter states: {ex.stutter_states}", file=out)
    if not ex.complete:
        print(f"incomplete: state cap of {cap} reached", file=out)
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _violation_index(trace, f, props):
    """First state that breaks ``G phi`` for propositional ``phi``; None for other shapes."""
    if not isinstance(f, Always) or is_temporal(f.arg):
        return None
    letter = letter_fn(props)
    for k, cfg in enumerate(trace.configs()):
        if not holds_in(f.arg, letter(cfg)):
            return k
    return None


def _render(trace, props, fmt):
    return dump_json(trace, props) if fmt == "json" else render_text(trace, props)


def _cmd_check(args, out, err):
    ls = _load(args, out, err, with_properties=not args.properties)
    pf = _props(args, ls)
    if pf is None:
        print("error: no property file given and the manifest names none", file=err)
        return EXIT_ERROR
    checks = pf.checks
    if args.only is not None:
        checks = [(n, f) for n, f in checks if n == args.only]
        if not checks:
            print(f"error: no check named {args.only!r}", file=err)
            return EXIT_ERROR
    cap = args.max_states if args.max_states is not None else default_max_states()
    props = pf.propositions
    code = EXIT_OK
    for name, f in checks:
        v = model_check(ls.initial, f, props, cap)
        print(f"{name}: {v.status} ({v.states} product states, {v.configs} configurations)", file=out)
        if v.inconclusive:
            print(f"  {v.reason}", file=out)
            if code == EXIT_OK:
                code = EXIT_INCONCLUSIVE
        elif v.violated:
            code = EXIT_VIOLATED
            used = [a for a in props if a in atoms(f)]
            k = _violation_index(v.trace, f, props)
            if k is not None:
                vals = valuation(v.trace.configs()[k], {a: props[a] for a in used})
                shown = ", ".join(f"{a}={'true' if vals[a] else 'false'}" for a in used)
                print(f"  violating state: [{k}] {shown}", file=out)
            print(f"  counterexample ({len(v.trace.prefix)} prefix steps, {len(v.trace.cycle)} cycle steps):", file=out)
            out.write(_render(v.trace, props, args.trace_format))
    return code


def _cmd_reach(args, out, err):
    ls = _load(args, out, err, with_properties=not args.properties)
    pf = _props(args, ls)
    props = dict(pf.propositions) if pf else {}
    goal, inline = parse_goal(args.goal)
    check_goal_atoms(inline, ls.system)
    props.update(inline)
    missing = atoms(goal) - set(props)
    if missing:
        print(f"error: unknown propositions {sorted(missing)}", file=err)
        return EXIT_ERROR
    cap = args.max_states if args.max_states is not None else default_max_states()
    try:
        trace = reachability(ls.initial, goal, props, cap)
    except StateCapExceeded as exc:
        print(f"INCONCLUSIVE: {exc}", file=out)
        return EXIT_INCONCLUSIVE
    if trace is None:
        print("UNREACHABLE", file=out)
        return EXIT_VIOLATED
    print(f"REACHABLE in {len(trace)} steps at t={format_value(trace.final.clock)}", file=out)
    shown = {n: props[n] for n in props if n in atoms(goal)}
    out.write(_render(trace, shown, args.trace_format))
    return EXIT_OK


COMMANDS = {
    "validate": _cmd_validate,
    "simulate": _cmd_simulate,
    "explore": _cmd_explore,
    "check": _cmd_check,
    "reach": _cmd_reach,
}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args, out, err)
    except ConfigError as exc:
        for d in exc.diagnostics:
            print(str(d), file=err)
        return EXIT_ERROR
    except ConfigFault as exc:
        print(f"error[ConfigFault]: {exc}", file=err)
        return EXIT_ERROR
    except (HetcoError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
