"""Text syntax: parser for definition files and pretty printers.

A file is a sequence of definitions::

    process P = +{q!l;P, q!m;0}          // singleton: q!l;P
    global  G = p->q:{l. G, m. end}      // singleton: p->q:l;G
    network N = p :: P | q :: Q

A missing continuation after a singleton prefix means ``0`` (resp. ``end``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import MixedChoice, ParseError
from .syntax import (
    IN,
    OUT,
    Choice,
    GlobalType,
    Network,
    Nil,
    Process,
    Ref,
    _build,
)

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|//[^\n]*)
  | (?P<sym>\+\{|&\{|::|->|[{}(),!?;:.=|0])
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)

_KEYWORDS = ("process", "global", "network")


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    out = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            out.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    out.append(_Tok("eof", "", line, pos - line_start + 1))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, offset: int = 0) -> _Tok:
        return self.toks[min(self.i + offset, len(self.toks) - 1)]

    def next(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, what: str, tok: _Tok | None = None):
        tok = tok or self.peek()
        found = tok.text or "end of input"
        raise ParseError(f"expected {what}, found {found!r}", tok.line, tok.col)

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "sym" and tok.text == text

    def expect(self, text: str) -> _Tok:
        if not self.at(text):
            self.fail(repr(text))
        return self.next()

    def ident(self, what: str = "identifier") -> str:
        tok = self.peek()
        if tok.kind != "ident":
            self.fail(what)
        return self.next().text

    def at_def_start(self) -> bool:
        tok = self.peek()
        return tok.kind == "eof" or (tok.kind == "ident" and tok.text in _KEYWORDS
                                     and self.peek(1).kind == "ident"
                                     and self.peek(2).text == "=")

    # processes ---------------------------------------------------------

    def proc(self):
        tok = self.peek()
        if self.at("0"):
            self.next()
            return Nil()
        if self.at("+{") or self.at("&{"):
            direction = OUT if self.next().text == "+{" else IN
            branches = [self.proc_branch(direction)]
            while self.at(","):
                self.next()
                branches.append(self.proc_branch(direction))
            self.expect("}")
            peers = {p for p, _, _ in branches}
            if len(peers) > 1:
                raise MixedChoice(
                    f"choice at line {tok.line} addresses several peers: {sorted(peers)}"
                )
            return Choice((direction, branches[0][0]), tuple((m, b) for _, m, b in branches))
        if tok.kind == "ident":
            nxt = self.peek(1)
            if nxt.kind == "sym" and nxt.text in (OUT, IN):
                peer, message, body = self.proc_branch(nxt.text)
                return Choice((nxt.text, peer), ((message, body),))
            self.next()
            return Ref(tok.text)
        self.fail("process")

    def proc_branch(self, direction: str):
        peer = self.ident("participant")
        if not self.at(direction):
            self.fail(repr(direction))
        self.next()
        message = self.ident("message label")
        if self.at(";"):
            self.next()
            return peer, message, self.proc()
        return peer, message, Nil()

    # global types ------------------------------------------------------

    def glob(self):
        tok = self.peek()
        if tok.kind != "ident":
            self.fail("global type")
        if tok.text == "end" and not (self.peek(1).kind == "sym" and self.peek(1).text == "->"):
            self.next()
            return Nil()
        if self.peek(1).kind == "sym" and self.peek(1).text == "->":
            sender = self.next().text
            self.next()
            receiver = self.ident("participant")
            self.expect(":")
            if self.at("{"):
                self.next()
                branches = [self.glob_branch()]
                while self.at(","):
                    self.next()
                    branches.append(self.glob_branch())
                self.expect("}")
                return Choice(("->", sender, receiver), tuple(branches))
            message = self.ident("message label")
            body = Nil()
            if self.at(";"):
                self.next()
                body = self.glob()
            return Choice(("->", sender, receiver), ((message, body),))
        self.next()
        return Ref(tok.text)

    def glob_branch(self):
        message = self.ident("message label")
        self.expect(".")
        return message, self.glob()

    # networks ------------------------------------------------------------

    def net(self):
        bindings = [self.binding()]
        while self.at("|"):
            self.next()
            bindings.append(self.binding())
        return bindings

    def binding(self):
        p = self.ident("participant")
        self.expect("::")
        return p, self.proc()


@dataclass
class Definitions:
    """Everything defined in one source file, fully resolved."""

    processes: dict[str, Process] = field(default_factory=dict)
    globals: dict[str, GlobalType] = field(default_factory=dict)
    networks: dict[str, Network] = field(default_factory=dict)


def parse_file(text: str) -> Definitions:
    parser = _Parser(text)
    proc_eqs: dict = {}
    glob_eqs: dict = {}
    nets: dict = {}
    while parser.peek().kind != "eof":
        tok = parser.peek()
        if tok.kind != "ident" or tok.text not in _KEYWORDS:
            parser.fail("'process', 'global' or 'network'")
        keyword = parser.next().text
        name = parser.ident("name")
        parser.expect("=")
        if keyword == "process":
            table = proc_eqs
            body = parser.proc()
        elif keyword == "global":
            table = glob_eqs
            body = parser.glob()
        else:
            table = nets
            body = parser.net()
        if name in table:
            raise ParseError(f"{keyword} {name!r} defined twice", tok.line, tok.col)
        table[name] = body
        if not parser.at_def_start():
            parser.fail("end of definition")
    extra = [expr for bindings in nets.values() for _, expr in bindings]
    processes, anon = _build(Process, proc_eqs, extra)
    globals_ = _build(GlobalType, glob_eqs)[0]
    networks = {}
    it = iter(anon)
    for name, bindings in nets.items():
        networks[name] = Network([(p, next(it)) for p, _ in bindings])
    return Definitions(processes, globals_, networks)


def _parse_expr(text: str, rule: str, defs: str = ""):
    parser = _Parser(text)
    expr = getattr(parser, rule)()
    if parser.peek().kind != "eof":
        parser.fail("end of input")
    return expr, parse_definitions_equations(defs)


def parse_definitions_equations(text: str) -> tuple[dict, dict]:
    parser = _Parser(text)
    procs: dict = {}
    globs: dict = {}
    while parser.peek().kind != "eof":
        keyword = parser.ident("'process' or 'global'")
        name = parser.ident("name")
        parser.expect("=")
        if keyword == "process":
            procs[name] = parser.proc()
        elif keyword == "global":
            globs[name] = parser.glob()
        else:
            parser.fail("'process' or 'global'")
    return procs, globs


def parse_process(text: str, defs: str = "") -> Process:
    """Parse one process expression; ``defs`` may supply named equations."""
    expr, (procs, _) = _parse_expr(text, "proc", defs)
    return _build(Process, procs, [expr])[1][0]


def parse_global(text: str, defs: str = "") -> GlobalType:
    expr, (_, globs) = _parse_expr(text, "glob", defs)
    return _build(GlobalType, globs, [expr])[1][0]


def parse_network(text: str, defs: str = "") -> Network:
    bindings, (procs, _) = _parse_expr(text, "net", defs)
    terms = _build(Process, procs, [e for _, e in bindings])[1]
    return Network([(p, t) for (p, _), t in zip(bindings, terms)])


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------


def _render(term, prefix: str) -> tuple[str, list[tuple[str, str]]]:
    """Render a term as an expression plus helper equations for shared or
    recursive nodes."""
    nodes = term.canonical_key()
    indegree = [0] * len(nodes)
    for _, branches in nodes:
        for _, c in branches:
            indegree[c] += 1
    is_nil = [len(branches) == 0 for _, branches in nodes]
    named = {
        i
        for i in range(len(nodes))
        if not is_nil[i] and (indegree[i] > 1 or (i == 0 and indegree[i] > 0))
    }
    # any cycle passes through a node with indegree > 1 or through the root
    names = {i: prefix if i == 0 else f"{prefix}_{i}" for i in named}
    process = isinstance(term, Process)

    def expr(i: int, top: bool = False) -> str:
        if i in names and not top:
            return names[i]
        head, branches = nodes[i]
        if not branches:
            return "0" if process else "end"
        if process:
            direction, peer = head
            parts = [f"{peer}{direction}{m};{expr(c)}" for m, c in branches]
            if len(parts) == 1:
                return parts[0]
            return ("+{" if direction == OUT else "&{") + ", ".join(parts) + "}"
        _, s, r = head
        if len(branches) == 1:
            m, c = branches[0]
            return f"{s}->{r}:{m};{expr(c)}"
        return f"{s}->{r}:{{" + ", ".join(f"{m}. {expr(c)}" for m, c in branches) + "}"

    equations = [(names[i], expr(i, top=True)) for i in sorted(named)]
    main = names[0] if 0 in names else expr(0, top=True)
    return main, equations


def format_process(p: Process, name: str = "P") -> str:
    """A definition file binding ``name`` to ``p`` (re-parses to an equal term)."""
    main, eqs = _render(p, name)
    lines = [f"process {n} = {e}" for n, e in eqs]
    if main != name:
        lines.insert(0, f"process {name} = {main}")
    return "\n".join(lines)


def format_global(g: GlobalType, name: str = "G") -> str:
    main, eqs = _render(g, name)
    lines = [f"global {n} = {e}" for n, e in eqs]
    if main != name:
        lines.insert(0, f"global {name} = {main}")
    return "\n".join(lines)


def format_network(n: Network, name: str = "N") -> str:
    lines = []
    parts = []
    for p, proc in n.items():
        main, eqs = _render(proc, f"{name}_{p}")
        lines.extend(f"process {a} = {b}" for a, b in eqs)
        parts.append(f"{p} :: {main}")
    body = " | ".join(parts) if parts else ""
    return "\n".join([f"network {name} = {body}"] + lines)


def _inline(main: str, eqs: list[tuple[str, str]]) -> str:
    if not eqs:
        return main
    return main + " where " + "; ".join(f"{a} = {b}" for a, b in eqs)


def format_process_expr(p: Process) -> str:
    """Compact one-line rendering, for messages and reprs."""
    return _inline(*_render(p, "X"))


def format_global_expr(g: GlobalType) -> str:
    return _inline(*_render(g, "X"))


def format_network_expr(n: Network) -> str:
    if not len(n):
        return "(empty)"
    return " | ".join(f"{p} :: {format_process_expr(proc)}" for p, proc in n.items())
