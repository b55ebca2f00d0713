"""Depth, boundedness, projection, the process preorder and network typing."""

from __future__ import annotations

import math

from .errors import Undefined
from .syntax import IN, OUT, GlobalType, Network, Process, _Table, process_equal

INFINITE = math.inf


# ---------------------------------------------------------------------------
# Depth and boundedness
# ---------------------------------------------------------------------------


def _involves(head: tuple, p: str) -> bool:
    return head[0] == "->" and (head[1] == p or head[2] == p)


def _depths(g: GlobalType, p: str) -> dict[int, float]:
    """Depth of ``p`` at every reachable node of ``g``'s graph."""
    table = g._table
    key = ("depths", g._root, p)
    hit = table.cache.get(key)
    if hit is not None:
        return hit
    nodes = table.nodes
    order = table.reachable(g._root)
    hits = {n for n in order if _involves(nodes[n][0], p)}
    free = [n for n in order if n not in hits]
    # p-free nodes from which a p-node is reachable along p-free nodes
    useful: set[int] = set()
    changed = True
    while changed:
        changed = False
        for n in free:
            if n in useful:
                continue
            if any(c in hits or c in useful for _, c in nodes[n][1]):
                useful.add(n)
                changed = True
    depth: dict[int, float] = {n: 1 for n in hits}
    for n in free:
        if n not in useful:
            depth[n] = 0
    # longest path in the useful subgraph, peeling nodes whose useful
    # successors are settled; whatever remains reaches a cycle
    pending = set(useful)
    progress = True
    while progress:
        progress = False
        for n in list(pending):
            succ = [c for _, c in nodes[n][1]]
            if any(c in pending for c in succ):
                continue
            best = 0
            for c in succ:
                if c in hits:
                    best = max(best, 2)
                elif c in useful:
                    best = max(best, 1 + depth[c])
            depth[n] = best
            pending.discard(n)
            progress = True
    for n in pending:
        depth[n] = INFINITE
    table.cache[key] = depth
    return depth


def depth(g: GlobalType, p: str) -> float:
    """Supremum over the traces of ``g`` of the position where ``p`` first
    occurs (1-based; 0 when it never occurs; ``INFINITE`` if unbounded)."""
    return _depths(g, p)[g._root]


def bounded(g: GlobalType) -> bool:
    key = ("bounded", g._root)
    cache = g._table.cache
    if key not in cache:
        cache[key] = all(
            d != INFINITE
            for p in g.participants()
            for d in _depths(g, p).values()
        )
    return cache[key]


# ---------------------------------------------------------------------------
# Projection
# ---------------------------------------------------------------------------


def project(g: GlobalType, r: str) -> Process:
    """Local behaviour of ``r`` prescribed by ``g``; raises ``Undefined``."""
    table = g._table
    key = ("proj", g._root, r)
    hit = table.cache.get(key)
    if hit is None:
        try:
            hit = _project(g, r)
        except Undefined as exc:
            hit = exc
        table.cache[key] = hit
    if isinstance(hit, Undefined):
        raise Undefined(str(hit))
    return hit


def _project(g: GlobalType, r: str) -> Process:
    nodes = g._table.nodes
    parts = g.node_participants()
    out: list = [(("0",), ())]  # index 0 is the shared inactive process
    slot: dict[int, int] = {}  # global node -> output node (constructors)
    alias: dict[int, list[int]] = {}  # global node -> candidate global children
    obligations: list[tuple[int, int, int]] = []  # (node, first child, other child)

    order = g._table.reachable(g._root)
    for n in order:
        head, branches = nodes[n]
        if r not in parts[n]:
            slot[n] = 0
        elif head[1] == r or head[2] == r:
            slot[n] = len(out)
            out.append(None)
        else:
            first = branches[0][1]
            if r not in parts[first]:
                raise Undefined(
                    f"{r} does not occur in the first branch of {head[1]}->{head[2]}"
                )
            alias[n] = [c for _, c in branches]
            obligations.extend((n, first, c) for _, c in branches[1:])

    resolved: dict[int, int] = {}

    def resolve(n: int, visiting: frozenset = frozenset()) -> int | None:
        if n in slot:
            return slot[n]
        if n in resolved:
            return resolved[n]
        if n in visiting:
            return None
        for c in alias[n]:
            target = resolve(c, visiting | {n})
            if target is not None:
                resolved[n] = target
                return target
        return None

    for n in alias:
        if resolve(n) is None:
            raise Undefined(f"{r} is postponed forever along a cycle of the type")

    def target(n: int) -> int:
        return slot[n] if n in slot else resolved[n]

    for n, s in slot.items():
        if s == 0:
            continue
        head, branches = nodes[n]
        if head[1] == r:
            new_head = (OUT, head[2])
        else:
            new_head = (IN, head[1])
        out[s] = (new_head, tuple((m, target(c)) for m, c in branches))

    result = Process(_Table(out), target(g._root))
    ptab = result._table
    for n, a, b in obligations:
        if not process_equal(Process(ptab, target(a)), Process(ptab, target(b))):
            head = nodes[n][0]
            raise Undefined(
                f"branches of {head[1]}->{head[2]} project differently on {r}"
            )
    return result.canonical()


def projectable(g: GlobalType, r: str) -> bool:
    try:
        project(g, r)
    except Undefined:
        return False
    return True


def well_formed(g: GlobalType) -> bool:
    key = ("wf", g._root)
    cache = g._table.cache
    if key not in cache:
        cache[key] = bounded(g) and all(projectable(g, p) for p in g.participants())
    return cache[key]


def well_formed_reason(g: GlobalType) -> str | None:
    """None when ``g`` is well formed, else a short explanation."""
    if not bounded(g):
        bad = sorted(p for p in g.participants() if depth(g, p) == INFINITE)
        if not bad:
            bad = sorted(
                p for p in g.participants()
                if any(d == INFINITE for d in _depths(g, p).values())
            )
        return "unbounded: infinite depth for " + ", ".join(bad)
    for p in sorted(g.participants()):
        try:
            project(g, p)
        except Undefined as exc:
            return f"projection on {p} undefined: {exc}"
    return None


# ---------------------------------------------------------------------------
# Preorder and typing
# ---------------------------------------------------------------------------


def proc_leq(p: Process, q: Process) -> bool:
    """Coinductive check of ``p <= q``: inputs may offer more, outputs must match."""
    tp, tq = p._table.nodes, q._table.nodes
    assumed: set[tuple[int, int]] = set()
    stack = [(p._root, q._root)]
    while stack:
        pair = stack.pop()
        if pair in assumed:
            continue
        assumed.add(pair)
        (hp, bp), (hq, bq) = tp[pair[0]], tq[pair[1]]
        if hp != hq:
            return False
        if hp[0] == OUT:
            if [m for m, _ in bp] != [m for m, _ in bq]:
                return False
            stack.extend((cp, cq) for (_, cp), (_, cq) in zip(bp, bq))
        elif hp[0] == IN:
            left = dict(bp)
            for m, cq in bq:
                cp = left.get(m)
                if cp is None:
                    return False
                stack.append((cp, cq))
    return True


def typing_failure(n: Network, g: GlobalType) -> str | None:
    """None when ``n`` is typed by ``g``; otherwise the first reason found."""
    reason = well_formed_reason(g)
    if reason is not None:
        return f"global type is not well formed ({reason})"
    missing = sorted(g.participants() - set(n.participants))
    if missing:
        return "no process for participant(s) " + ", ".join(missing)
    for p, proc in n.items():
        local = project(g, p)
        if not proc_leq(proc, local):
            from .surface import format_process_expr

            return (
                f"process of {p} is not below its projection "
                f"{format_process_expr(local)}"
            )
    return None


def typecheck(n: Network, g: GlobalType) -> bool:
    return typing_failure(n, g) is None
