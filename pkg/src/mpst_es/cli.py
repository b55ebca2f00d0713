"""Command-line front end.

Exit codes: 0 success, 1 failed check, 2 parse or validation error,
3 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import es_core as es
from .errors import NotEnabled, NotWellFormed, ParseError, SessionError, Undefined, ValidationError
from .global_es import esg, gevent_json
from .lts import run
from .net_es import esn, nevent_json
from .proc_es import esp, format_pevent
from .surface import (
    Definitions,
    format_global_expr,
    format_network_expr,
    format_process,
    format_process_expr,
    parse_file,
)
from .syntax import Network, parse_trace
from .typesys import project, typing_failure

OK, FAILED, INVALID, USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False)


# ---------------------------------------------------------------------------
# Input selection
# ---------------------------------------------------------------------------


def _load(path: str) -> Definitions:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse_file(text)


def _lookup(defs: Definitions, kind: str, name: str):
    table = {"network": defs.networks, "global": defs.globals, "process": defs.processes}[kind]
    if name not in table:
        known = ", ".join(sorted(table)) or "none"
        raise UsageError(f"no {kind} named {name!r} (defined: {known})")
    return table[name]


def _subject(args, defs: Definitions, kinds: Sequence[str]):
    chosen = [k for k in kinds if getattr(args, _dest(k), None)]
    if len(chosen) != 1:
        raise UsageError("give exactly one of " + ", ".join(f"--{k}" for k in kinds))
    kind = chosen[0]
    return kind, _lookup(defs, kind, getattr(args, _dest(kind)))


def _dest(kind: str) -> str:
    return "global_" if kind == "global" else kind


def _recursive(term) -> bool:
    if isinstance(term, Network):
        return any(p.is_recursive() for _, p in term.items())
    return term.is_recursive()


def _height(term) -> int:
    if isinstance(term, Network):
        return max([p.height() for _, p in term.items()], default=0)
    return term.height()


def _bound(args, *terms) -> int:
    if args.bound is not None:
        if args.bound < 1:
            raise UsageError("--bound must be at least 1")
        return args.bound
    if any(_recursive(t) for t in terms):
        raise UsageError("recursive input: --bound K is required")
    return max(1, max(_height(t) for t in terms))


def _structure(kind: str, term, bound: int):
    if kind == "network":
        return esn(term, bound), nevent_json
    if kind == "global":
        return esg(term, bound), gevent_json
    return esp(term, bound), lambda eta: [str(a) for a in eta]


def _event_text(e) -> str:
    return format_pevent(e) if isinstance(e, tuple) and not hasattr(e, "_fields") else str(e)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_check(args, out) -> int:
    defs = _load(args.file)
    n = _lookup(defs, "network", args.network)
    g = _lookup(defs, "global", args.global_)
    reason = typing_failure(n, g)
    if args.json:
        print(_dump({"typed": reason is None, "reason": reason}), file=out)
    else:
        print("typed" if reason is None else f"not typed: {reason}", file=out)
    return OK if reason is None else FAILED


def cmd_project(args, out) -> int:
    defs = _load(args.file)
    g = _lookup(defs, "global", args.global_)
    try:
        proc = project(g, args.participant)
    except Undefined as exc:
        if args.json:
            print(_dump({"defined": False, "reason": str(exc)}), file=out)
        else:
            print(f"undefined: {exc}", file=out)
        return FAILED
    if args.json:
        print(_dump({"defined": True, "process": format_process_expr(proc)}), file=out)
    else:
        print(format_process(proc, f"{args.global_}_{args.participant}"), file=out)
    return OK


def cmd_events(args, out) -> int:
    defs = _load(args.file)
    kind, term = _subject(args, defs, ("network", "global", "process"))
    bound = _bound(args, term)
    s, as_json = _structure(kind, term, bound)
    if args.dot:
        print(es.to_dot(s, "ES", _event_text), file=out)
        return OK
    index = {e: i for i, e in enumerate(s.events)}
    arrows = sorted((index[a], index[b]) for a, b in s.arrows)
    conflict = sorted((index[a], index[b]) for a, b in s.conflict if index[a] <= index[b])
    relation = "flow" if kind == "network" else "causality"
    if args.json:
        print(_dump({
            "kind": kind, "bound": bound, "exact": s.exact,
            "events": [as_json(e) for e in s.events],
            relation: arrows, "conflict": conflict,
        }), file=out)
        return OK
    for i, e in enumerate(s.events):
        print(f"e{i}  {_event_text(e)}", file=out)
    print(f"{relation}: " + (", ".join(f"e{a}<e{b}" for a, b in arrows) or "none"), file=out)
    print("conflict: " + (", ".join(f"e{a}#e{b}" for a, b in conflict) or "none"), file=out)
    print(f"{len(s.events)} events (bound {bound}, exact: {str(s.exact).lower()})", file=out)
    return OK


def cmd_configs(args, out) -> int:
    defs = _load(args.file)
    kind, term = _subject(args, defs, ("network", "global", "process"))
    bound = _bound(args, term)
    s, _ = _structure(kind, term, bound)
    # a complete structure has a finite domain; otherwise only sizes <= bound are exact
    domain = es.enumerate_configs(s, None if s.exact else bound)
    rows = [sorted(_event_text(e) for e in c) for c in domain]
    if args.json:
        print(_dump({"kind": kind, "bound": bound, "exact": s.exact, "configurations": rows}),
              file=out)
        return OK
    for row in rows:
        print("{" + ", ".join(row) + "}" if row else "∅", file=out)
    word = "configuration" if len(rows) == 1 else "configurations"
    print(f"{len(rows)} {word} (bound {bound}, exact: {str(s.exact).lower()})", file=out)
    return OK


def cmd_run(args, out) -> int:
    defs = _load(args.file)
    kind, term = _subject(args, defs, ("network", "global"))
    trace = parse_trace(args.trace)
    try:
        result = run(term, trace)
    except NotEnabled as exc:
        if args.json:
            print(_dump({"ok": False, "index": exc.index, "reason": str(exc)}), file=out)
        else:
            print(f"failed: {exc}", file=out)
        return FAILED
    text = format_network_expr(result) if kind == "network" else format_global_expr(result)
    if args.json:
        print(_dump({"ok": True, "result": text}), file=out)
    else:
        print(text, file=out)
    return OK


def _print_reports(reports, args, out) -> int:
    if args.json:
        print(_dump([r.to_json() for r in reports]), file=out)
    else:
        for r in reports:
            line = f"{r.property}: {r.verdict}"
            if r.counterexample:
                line += "  " + json.dumps(r.counterexample, sort_keys=True, ensure_ascii=False)
            print(line, file=out)
    return OK if all(r.ok for r in reports) else FAILED


def cmd_iso(args, out) -> int:
    from .verify import check_isomorphism

    defs = _load(args.file)
    n = _lookup(defs, "network", args.network)
    g = _lookup(defs, "global", args.global_)
    bound = _bound(args, n, g)
    report = check_isomorphism(n, g, bound)
    code = _print_reports([report], args, out)
    if report.ok and not args.json:
        print(f"{report.details['configurations']} configurations on each side "
              f"(bound {bound}, exact: {str(report.details['exact']).lower()})", file=out)
    return code


def cmd_verify(args, out) -> int:
    from . import verify as v

    if args.random:
        if args.file:
            raise UsageError("--random takes no FILE")
        bound = 5 if args.bound is None else args.bound
        result = v.run_campaign(range(args.seeds, args.seeds + args.count), size=args.size,
                                bound=bound, max_len=args.max_len, shrink=not args.no_shrink)
        if args.json:
            print(_dump([r.to_json() for r in result.reports]), file=out)
        else:
            for name, (ok, bad) in result.by_property().items():
                print(f"{name}: {ok} passed, {bad} failed", file=out)
            for r in result.failures():
                print(_dump(r.to_json()), file=out)
            print(f"{result.pairs} pairs", file=out)
        return OK if not result.failures() else FAILED
    if not args.file:
        raise UsageError("give FILE with --network and --global, or --random")
    defs = _load(args.file)
    n = _lookup(defs, "network", args.network)
    g = _lookup(defs, "global", args.global_)
    props = args.property or ["sr", "sf", "progress", "iso"]
    reports = []
    for prop in props:
        if prop == "sr":
            reports.append(v.check_subject_reduction(n, g, args.max_len))
        elif prop == "sf":
            reports.append(v.check_session_fidelity(n, g, args.max_len))
        elif prop == "progress":
            reports.append(v.check_progress(n, g, args.progress_bound))
        else:
            reports.append(v.check_isomorphism(n, g, _bound(args, n, g)))
    return _print_reports(reports, args, out)


def cmd_dot(args, out) -> int:
    args.dot, args.json = True, False
    return cmd_events(args, out)


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mpst-es", description="Session types and their event structures.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def add(name, func, help_, subjects=(), file_required=True):
        p = sub.add_parser(name, help=help_)
        p.add_argument("file", metavar="FILE", nargs=None if file_required else "?")
        for kind in subjects:
            p.add_argument(f"--{kind}", dest=_dest(kind), metavar=kind[0].upper())
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.set_defaults(func=func)
        return p

    add("check", cmd_check, "typecheck a network against a global type", ("network", "global"))
    p = add("project", cmd_project, "project a global type on a participant", ("global",))
    p.add_argument("--participant", required=True)
    for name, func, help_ in (
        ("events", cmd_events, "list the events of a term"),
        ("configs", cmd_configs, "list the configurations of a term"),
        ("dot", cmd_dot, "event structure as Graphviz text"),
    ):
        p = add(name, func, help_, ("network", "global", "process"))
        p.add_argument("--bound", type=int)
        if name == "events":
            p.add_argument("--dot", action="store_true")
    p = add("run", cmd_run, "execute a trace", ("network", "global"))
    p.add_argument("--trace", required=True, help='e.g. "p->q:l,q->r:m"')
    p = add("iso", cmd_iso, "compare configuration domains", ("network", "global"))
    p.add_argument("--bound", type=int)
    p = add("verify", cmd_verify, "check the typing theorems", ("network", "global"),
            file_required=False)
    p.add_argument("--property", action="append", choices=("sr", "sf", "progress", "iso"))
    p.add_argument("--max-len", type=int, default=6)
    p.add_argument("--bound", type=int, help="event bound for iso")
    p.add_argument("--progress-bound", type=int)
    p.add_argument("--random", action="store_true", help="generated typed pairs")
    p.add_argument("--seeds", type=int, default=0, help="first seed")
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--size", type=int, default=5)
    p.add_argument("--no-shrink", action="store_true")
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    err = sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "dot", False) and getattr(args, "json", False):
            raise UsageError("--json and --dot are exclusive")
        return args.func(args, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=err)
        return USAGE
    except (ParseError, ValidationError, NotWellFormed) as exc:
        print(f"error: {exc}", file=err)
        return INVALID
    except SessionError as exc:
        print(f"error: {exc}", file=err)
        return INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
