"""Data model: actions, communications, traces, regular terms and networks.

Processes and global types are possibly infinite but regular trees.  They
are stored as finite node graphs: a shared node table plus a root index.
Recursion shows up as back-edges in the table.  Two terms are equal when
their unfoldings coincide; this is decided by minimising the reachable part
of the graph into a canonical node tuple, which also serves as hash key.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

from .errors import (
    DuplicateBranchLabel,
    EmptyChoice,
    MixedChoice,
    NonContractive,
    SelfCommunication,
    UndefinedName,
    ValidationError,
)

OUT = "!"
IN = "?"


class Action(NamedTuple):
    """An output ``peer!message`` or an input ``peer?message``."""

    direction: str
    peer: str
    message: str

    def __str__(self) -> str:
        return f"{self.peer}{self.direction}{self.message}"

    @property
    def is_output(self) -> bool:
        return self.direction == OUT


class Communication(NamedTuple):
    """A synchronous exchange of ``message`` from ``sender`` to ``receiver``.

    Tuple order (sender, message, receiver) is the canonical order.
    """

    sender: str
    message: str
    receiver: str

    def __str__(self) -> str:
        return f"{self.sender}->{self.receiver}:{self.message}"

    @property
    def participants(self) -> frozenset[str]:
        return frozenset((self.sender, self.receiver))

    def project(self, r: str) -> Action | None:
        """The action ``r`` performs in this communication, if any."""
        if r == self.sender:
            return Action(OUT, self.receiver, self.message)
        if r == self.receiver:
            return Action(IN, self.sender, self.message)
        return None


Trace = tuple  # tuple[Communication, ...]


def comm(sender: str, message: str, receiver: str) -> Communication:
    if sender == receiver:
        raise SelfCommunication(f"{sender} cannot communicate with itself")
    return Communication(sender, message, receiver)


def trace_participants(trace: Iterable[Communication]) -> frozenset[str]:
    out: set[str] = set()
    for c in trace:
        out.add(c.sender)
        out.add(c.receiver)
    return frozenset(out)


def format_trace(trace: Iterable[Communication]) -> str:
    return ",".join(str(c) for c in trace)


def parse_trace(text: str) -> tuple[Communication, ...]:
    """Parse ``"p->q:l,q->r:m"``; the empty string is the empty trace."""
    items = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            route, message = chunk.split(":")
            sender, receiver = route.split("->")
        except ValueError:
            raise ValidationError(f"malformed communication {chunk!r}") from None
        parts = [sender.strip(), message.strip(), receiver.strip()]
        if not all(_is_ident(x) for x in parts):
            raise ValidationError(f"malformed communication {chunk!r}")
        items.append(comm(*parts))
    return tuple(items)


def _is_ident(text: str) -> bool:
    return bool(text) and text[0].isascii() and text[0].isalpha() and all(
        ch.isascii() and (ch.isalnum() or ch == "_") for ch in text
    )


# ---------------------------------------------------------------------------
# Node tables
# ---------------------------------------------------------------------------
#
# A node is ``(head, branches)``.  ``head`` is a small tuple naming the
# constructor, ``branches`` a tuple of ``(message, child_index)`` sorted by
# message.  Process heads: ("!", peer), ("?", peer), ("0",).  Global heads:
# ("->", sender, receiver), ("end",).


class _Table:
    """Immutable node store shared by a term and all its subterms."""

    __slots__ = ("nodes", "cache")

    def __init__(self, nodes: Sequence[tuple]):
        self.nodes = tuple(nodes)
        # per-table memo for derived data (canonical forms, participants...)
        self.cache: dict = {}

    def reachable(self, root: int) -> list[int]:
        key = ("reach", root)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        seen = {root}
        order = [root]
        for n in order:
            for _, child in self.nodes[n][1]:
                if child not in seen:
                    seen.add(child)
                    order.append(child)
        self.cache[key] = order
        return order

    def canonical(self, root: int) -> tuple:
        """Minimal node tuple (root first) describing the unfolding at ``root``."""
        key = ("canon", root)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        order = self.reachable(root)
        nodes = self.nodes
        block = {n: (nodes[n][0], tuple(m for m, _ in nodes[n][1])) for n in order}
        count = len(set(block.values()))
        while True:
            sig = {n: (block[n], tuple(block[c] for _, c in nodes[n][1])) for n in order}
            ids: dict = {}
            for n in order:
                ids.setdefault(sig[n], len(ids))
            new_block = {n: ids[sig[n]] for n in order}
            if len(ids) == count:
                block = new_block
                break
            block, count = new_block, len(ids)
        # renumber blocks breadth first from the root, branches in message order
        number: dict = {}
        rep: dict = {}
        queue = [root]
        number[block[root]] = 0
        rep[block[root]] = root
        for n in queue:
            for _, c in nodes[n][1]:
                b = block[c]
                if b not in number:
                    number[b] = len(number)
                    rep[b] = c
                    queue.append(c)
        out = [None] * len(number)
        for b, i in number.items():
            n = rep[b]
            head, branches = nodes[n]
            out[i] = (head, tuple((m, number[block[c]]) for m, c in branches))
        result = tuple(out)
        self.cache[key] = result
        return result


class _Term:
    __slots__ = ("_table", "_root")

    def __init__(self, table: _Table, root: int = 0):
        self._table = table
        self._root = root

    @classmethod
    def _from_nodes(cls, nodes: Sequence[tuple], root: int = 0):
        return cls(_Table(nodes), root)

    @property
    def _node(self) -> tuple:
        return self._table.nodes[self._root]

    @property
    def head(self) -> tuple:
        return self._node[0]

    def canonical_key(self) -> tuple:
        return self._table.canonical(self._root)

    def canonical(self):
        """An equal term stored in its own minimal table."""
        return type(self)._from_nodes(self.canonical_key())

    def __eq__(self, other) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        if other._table is self._table and other._root == self._root:
            return True
        return self.canonical_key() == other.canonical_key()

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.canonical_key()))

    @property
    def messages(self) -> tuple[str, ...]:
        return tuple(m for m, _ in self._node[1])

    def _child(self, index: int):
        return type(self)(self._table, index)

    @property
    def branches(self) -> dict:
        """Continuations keyed by message, in message order."""
        return {m: self._child(c) for m, c in self._node[1]}

    def branch(self, message: str):
        for m, c in self._node[1]:
            if m == message:
                return self._child(c)
        raise KeyError(message)

    def subterms(self) -> list:
        """Every distinct subterm reachable from this one (including itself)."""
        return [self._child(n) for n in self._table.reachable(self._root)]

    def is_recursive(self) -> bool:
        """True when the node graph reachable from the root has a cycle."""
        key = ("cyclic", self._root)
        cache = self._table.cache
        if key not in cache:
            cache[key] = _has_cycle(self._table, self._root)
        return cache[key]

    def height(self) -> int | None:
        """Length of the longest root-to-leaf path, or None if recursive."""
        if self.is_recursive():
            return None
        nodes = self._table.nodes
        memo: dict[int, int] = {}
        for n in reversed(_topological(self._table, self._root)):
            memo[n] = max((1 + memo[c] for _, c in nodes[n][1]), default=0)
        return memo[self._root]

    @classmethod
    def _compose(cls, head: tuple, branches: Mapping[str, "_Term"]):
        """Build a fresh term whose root is ``head`` over existing terms."""
        nodes: list = [None]
        offsets: dict[int, int] = {}
        children = []
        for m in sorted(branches):
            t = branches[m]
            if not isinstance(t, cls):
                raise TypeError(f"expected {cls.__name__}, got {type(t).__name__}")
            off = offsets.get(id(t._table))
            if off is None:
                off = len(nodes)
                offsets[id(t._table)] = off
                for h, bs in t._table.nodes:
                    nodes.append((h, tuple((mm, c + off) for mm, c in bs)))
            children.append((m, t._root + off))
        nodes[0] = (head, tuple(children))
        return cls._from_nodes(nodes).canonical()


def _has_cycle(table: _Table, root: int) -> bool:
    nodes = table.nodes
    colour: dict[int, int] = {}
    stack = [(root, iter(nodes[root][1]))]
    colour[root] = 1
    while stack:
        n, it = stack[-1]
        step = next(it, None)
        if step is None:
            colour[n] = 2
            stack.pop()
            continue
        c = step[1]
        state = colour.get(c)
        if state == 1:
            return True
        if state is None:
            colour[c] = 1
            stack.append((c, iter(nodes[c][1])))
    return False


def _topological(table: _Table, root: int) -> list[int]:
    """Reverse post-order of an acyclic reachable graph (parents first)."""
    nodes = table.nodes
    seen = {root}
    post: list[int] = []
    stack = [(root, iter(nodes[root][1]))]
    while stack:
        n, it = stack[-1]
        step = next(it, None)
        if step is None:
            post.append(n)
            stack.pop()
            continue
        c = step[1]
        if c not in seen:
            seen.add(c)
            stack.append((c, iter(nodes[c][1])))
    post.reverse()
    return post


# ---------------------------------------------------------------------------
# Processes
# ---------------------------------------------------------------------------


class Process(_Term):
    """A regular process: output choice, input choice or the inactive process."""

    __slots__ = ()

    @property
    def kind(self) -> str:
        """``"out"``, ``"in"`` or ``"end"``."""
        tag = self.head[0]
        return "out" if tag == OUT else "in" if tag == IN else "end"

    @property
    def is_inact(self) -> bool:
        return self.head[0] == "0"

    @property
    def peer(self) -> str | None:
        head = self.head
        return head[1] if len(head) > 1 else None

    @property
    def direction(self) -> str | None:
        tag = self.head[0]
        return tag if tag in (OUT, IN) else None

    def actions(self) -> list[Action]:
        """The actions offered at the root, in message order."""
        d, p = self.direction, self.peer
        if d is None:
            return []
        return [Action(d, p, m) for m in self.messages]

    def participants(self) -> frozenset[str]:
        return frozenset(
            self._table.nodes[n][0][1]
            for n in self._table.reachable(self._root)
            if len(self._table.nodes[n][0]) > 1
        )

    def __repr__(self) -> str:
        from .surface import format_process_expr

        return f"Process({format_process_expr(self)!r})"


def inact() -> Process:
    return Process._from_nodes([(("0",), ())])


def _check_branches(branches: Mapping) -> None:
    if not branches:
        raise EmptyChoice("a choice needs at least one branch")


def send(peer: str, branches: Mapping[str, Process]) -> Process:
    """``+{peer!m;P, ...}`` built from existing continuations."""
    _check_branches(branches)
    return Process._compose((OUT, peer), branches)


def receive(peer: str, branches: Mapping[str, Process]) -> Process:
    """``&{peer?m;P, ...}`` built from existing continuations."""
    _check_branches(branches)
    return Process._compose((IN, peer), branches)


def process_equal(p: Process, q: Process) -> bool:
    """Coinductive equality of unfoldings, with an assumed-pairs set."""
    tp, tq = p._table.nodes, q._table.nodes
    assumed: set[tuple[int, int]] = set()
    stack = [(p._root, q._root)]
    while stack:
        pair = stack.pop()
        if pair in assumed:
            continue
        assumed.add(pair)
        (hp, bp), (hq, bq) = tp[pair[0]], tq[pair[1]]
        if hp != hq or len(bp) != len(bq):
            return False
        for (mp, cp), (mq, cq) in zip(bp, bq):
            if mp != mq:
                return False
            stack.append((cp, cq))
    return True


# ---------------------------------------------------------------------------
# Global types
# ---------------------------------------------------------------------------


class GlobalType(_Term):
    """A regular global type: ``sender->receiver:{m. G, ...}`` or ``end``."""

    __slots__ = ()

    @property
    def is_end(self) -> bool:
        return self.head[0] == "end"

    @property
    def sender(self) -> str | None:
        head = self.head
        return head[1] if len(head) > 1 else None

    @property
    def receiver(self) -> str | None:
        head = self.head
        return head[2] if len(head) > 1 else None

    def communications(self) -> list[Communication]:
        """Communications decorating the root edges, in message order."""
        if self.is_end:
            return []
        s, r = self.sender, self.receiver
        return [Communication(s, m, r) for m in self.messages]

    def node_participants(self) -> dict[int, frozenset[str]]:
        """Participants of every reachable subterm, keyed by node index."""
        key = ("parts", self._root)
        cache = self._table.cache
        hit = cache.get(key)
        if hit is not None:
            return hit
        nodes = self._table.nodes
        order = self._table.reachable(self._root)
        parts = {
            n: frozenset(nodes[n][0][1:]) if nodes[n][0][0] == "->" else frozenset()
            for n in order
        }
        changed = True
        while changed:
            changed = False
            for n in reversed(order):
                acc = parts[n]
                for _, c in nodes[n][1]:
                    acc = acc | parts[c]
                if acc != parts[n]:
                    parts[n] = acc
                    changed = True
        cache[key] = parts
        return parts

    def participants(self) -> frozenset[str]:
        return self.node_participants()[self._root]

    def __repr__(self) -> str:
        from .surface import format_global_expr

        return f"GlobalType({format_global_expr(self)!r})"


def end() -> GlobalType:
    return GlobalType._from_nodes([(("end",), ())])


def choice(sender: str, receiver: str, branches: Mapping[str, GlobalType]) -> GlobalType:
    """``sender->receiver:{m. G, ...}`` built from existing continuations."""
    if sender == receiver:
        raise SelfCommunication(f"{sender} cannot communicate with itself")
    _check_branches(branches)
    return GlobalType._compose(("->", sender, receiver), branches)


def participants_global(g: GlobalType) -> frozenset[str]:
    return g.participants()


# ---------------------------------------------------------------------------
# Equation systems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Ref:
    """Reference to a named definition."""

    name: str


@dataclass(frozen=True)
class Nil:
    """``0`` for processes, ``end`` for global types."""


@dataclass(frozen=True)
class Choice:
    """A choice node of either syntax.

    For processes ``head`` is ``("!", peer)`` or ``("?", peer)``; for global
    types it is ``("->", sender, receiver)``.  ``branches`` keeps source order
    so duplicate labels can be reported.
    """

    head: tuple
    branches: tuple  # of (message, expression)


def _build(kind: type, equations: Mapping[str, object], extra: Sequence[object] = ()):
    """Turn named equations (plus anonymous expressions) into one node table.

    Returns ``(terms_by_name, extra_terms)``.
    """
    nil_head = ("0",) if kind is Process else ("end",)

    def resolve(name: str, chain: tuple = ()) -> object:
        if name in chain:
            raise NonContractive(
                "unguarded recursion through " + " = ".join(chain + (name,))
            )
        if name not in equations:
            raise UndefinedName(f"undefined name {name!r}")
        body = equations[name]
        if isinstance(body, Ref):
            return resolve(body.name, chain + (name,))
        return name

    # every name maps to the name whose body is an actual constructor
    target = {name: resolve(name) for name in equations}
    nodes: list = []
    index: dict[str, int] = {}
    for name in equations:
        if target[name] == name:
            index[name] = len(nodes)
            nodes.append(None)

    def emit(expr, slot: int | None = None) -> int:
        if isinstance(expr, Ref):
            if expr.name not in target:
                raise UndefinedName(f"undefined name {expr.name!r}")
            return index[target[expr.name]]
        if slot is None:
            slot = len(nodes)
            nodes.append(None)
        if isinstance(expr, Nil):
            nodes[slot] = (nil_head, ())
            return slot
        if not isinstance(expr, Choice):
            raise TypeError(f"not a term expression: {expr!r}")
        if not expr.branches:
            raise EmptyChoice("a choice needs at least one branch")
        if kind is GlobalType and expr.head[1] == expr.head[2]:
            raise SelfCommunication(f"{expr.head[1]} cannot communicate with itself")
        seen: set[str] = set()
        children = []
        for message, sub in expr.branches:
            if message in seen:
                raise DuplicateBranchLabel(f"label {message!r} occurs twice in one choice")
            seen.add(message)
            children.append((message, emit(sub)))
        children.sort()
        nodes[slot] = (expr.head, tuple(children))
        return slot

    for name in equations:
        if target[name] == name:
            emit(equations[name], index[name])
    roots = [emit(e) for e in extra]
    table = _Table(nodes)
    terms = {name: kind(table, index[target[name]]) for name in equations}
    return terms, [kind(table, r) for r in roots]


def build_processes(equations: Mapping[str, object]) -> dict[str, Process]:
    return _build(Process, equations)[0]


def build_process(equations: Mapping[str, object], name: str | None = None) -> Process:
    """Build the process bound to ``name`` (default: the first equation)."""
    terms = build_processes(equations)
    return terms[name if name is not None else next(iter(equations))]


def build_globals(equations: Mapping[str, object]) -> dict[str, GlobalType]:
    return _build(GlobalType, equations)[0]


def build_global(equations: Mapping[str, object], name: str | None = None) -> GlobalType:
    terms = build_globals(equations)
    return terms[name if name is not None else next(iter(equations))]


# ---------------------------------------------------------------------------
# Networks
# ---------------------------------------------------------------------------


class Network:
    """Finite map from participants to processes, with inactive bindings dropped."""

    __slots__ = ("_items", "_map", "_hash")

    def __init__(self, bindings: Mapping[str, Process] | Iterable[tuple[str, Process]] = ()):
        pairs = bindings.items() if isinstance(bindings, Mapping) else bindings
        m: dict[str, Process] = {}
        for p, proc in pairs:
            if p in m:
                raise ValidationError(f"participant {p!r} bound twice")
            m[p] = proc
        self._items = tuple(sorted((p, proc) for p, proc in m.items() if not proc.is_inact))
        self._map = dict(self._items)
        self._hash = None

    def __getitem__(self, p: str) -> Process:
        proc = self._map.get(p)
        return proc if proc is not None else inact()

    def __contains__(self, p: str) -> bool:
        return p in self._map

    def __iter__(self) -> Iterator[str]:
        return iter(self._map)

    def __len__(self) -> int:
        return len(self._items)

    def items(self):
        return self._items

    @property
    def participants(self) -> tuple[str, ...]:
        return tuple(p for p, _ in self._items)

    def update(self, changes: Mapping[str, Process]) -> "Network":
        m = dict(self._map)
        m.update(changes)
        return Network(m)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Network):
            return NotImplemented
        return self._items == other._items

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._items)
        return self._hash

    def __repr__(self) -> str:
        from .surface import format_network_expr

        return f"Network({format_network_expr(self)!r})"
