"""Global events and the prime event structure of a global type.

A g-event is a class of pointed traces under swapping adjacent
communications with disjoint participants.  Classes are represented by
their lexicographically least member.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

from .errors import NotWellFormed, Undefined
from .es_core import PrimeES
from .net_es import LocatedEvent, NEvent
from .proc_es import pe_conflict
from .syntax import Action, Communication, GlobalType, format_trace, trace_participants

# ---------------------------------------------------------------------------
# Traces
# ---------------------------------------------------------------------------


def g_traces(g: GlobalType, bound: int) -> frozenset[tuple]:
    """Root-to-edge decoration sequences of ``g`` of length at most ``bound``."""
    out = set()
    frontier = [((), g)]
    for _ in range(bound):
        nxt = []
        for prefix, t in frontier:
            for c in t.communications():
                trace = prefix + (c,)
                out.add(trace)
                nxt.append((trace, t.branch(c.message)))
        frontier = nxt
    return frozenset(out)


def _independent(a: Communication, b: Communication) -> bool:
    return a.sender != b.sender and a.sender != b.receiver and a.receiver != b.sender \
        and a.receiver != b.receiver


@lru_cache(maxsize=1 << 16)
def normal_form(trace: tuple) -> tuple:
    """Least member of the swap class of ``trace``.

    Repeatedly emits the smallest communication that no remaining earlier
    communication depends on.  Distinct candidates at one step are pairwise
    independent, hence distinct, so the greedy choice is the least one.
    """
    remaining = list(trace)
    out = []
    while remaining:
        best = None
        for i, c in enumerate(remaining):
            if all(_independent(remaining[j], c) for j in range(i)):
                if best is None or c < remaining[best]:
                    best = i
        out.append(remaining.pop(best))
    return tuple(out)


def trace_equiv(s1: Sequence[Communication], s2: Sequence[Communication]) -> bool:
    s1, s2 = tuple(s1), tuple(s2)
    return len(s1) == len(s2) and normal_form(s1) == normal_form(s2)


def class_members(trace: Sequence[Communication]) -> frozenset[tuple]:
    """All traces reachable by swapping adjacent independent communications."""
    start = tuple(trace)
    seen = {start}
    queue = [start]
    for t in queue:
        for i in range(len(t) - 1):
            if _independent(t[i], t[i + 1]):
                u = t[:i] + (t[i + 1], t[i]) + t[i + 2:]
                if u not in seen:
                    seen.add(u)
                    queue.append(u)
    return frozenset(seen)


def is_pointed(trace: Sequence[Communication]) -> bool:
    trace = tuple(trace)
    if not trace:
        return False
    later = set(trace[-1].participants)
    for c in reversed(trace[:-1]):
        if not (c.participants & later):
            return False
        later |= c.participants
    return True


def proj_trace(trace: Iterable[Communication], r: str) -> tuple[Action, ...]:
    return tuple(a for c in trace if (a := c.project(r)) is not None)


# ---------------------------------------------------------------------------
# Global events
# ---------------------------------------------------------------------------


class GEvent(NamedTuple):
    canonical: tuple

    @classmethod
    def of(cls, trace: Sequence[Communication]) -> "GEvent":
        trace = tuple(trace)
        if not is_pointed(trace):
            raise ValueError(f"{format_trace(trace)} is not a pointed trace")
        return cls(normal_form(trace))

    @property
    def cm(self) -> Communication:
        return self.canonical[-1]

    @property
    def size(self) -> int:
        return len(self.canonical)

    @property
    def participants(self) -> frozenset[str]:
        return trace_participants(self.canonical)

    def members(self) -> frozenset[tuple]:
        return class_members(self.canonical)

    def __str__(self) -> str:
        return "[" + format_trace(self.canonical) + "]"


def g_retrieval(alpha: Communication, gamma: GEvent) -> GEvent:
    """``gamma`` seen before ``alpha``: prefixed when they share a participant."""
    if alpha.participants & gamma.participants:
        return GEvent(normal_form((alpha,) + gamma.canonical))
    return gamma


def g_retrieval_trace(trace: Sequence[Communication], gamma: GEvent) -> GEvent:
    for alpha in reversed(tuple(trace)):
        gamma = g_retrieval(alpha, gamma)
    return gamma


def ev(trace: Sequence[Communication]) -> GEvent:
    """The g-event of the last communication of ``trace``."""
    trace = tuple(trace)
    if not trace:
        raise ValueError("ev needs a nonempty trace")
    return g_retrieval_trace(trace[:-1], GEvent((trace[-1],)))


def g_residual(gamma: GEvent, alpha: Communication) -> GEvent:
    """``gamma`` seen after ``alpha``; raises ``Undefined``."""
    trace = gamma.canonical
    for i, c in enumerate(trace):
        if not _independent(c, alpha):
            if c != alpha:
                raise Undefined(f"{alpha} cannot be brought to the front of {gamma}")
            rest = trace[:i] + trace[i + 1:]
            if not rest:
                raise Undefined(f"{gamma} would become empty after {alpha}")
            return GEvent(normal_form(rest))
    return gamma


def g_residual_trace(gamma: GEvent, trace: Sequence[Communication]) -> GEvent:
    for alpha in trace:
        gamma = g_residual(gamma, alpha)
    return gamma


def g_leq(gamma: GEvent, other: GEvent) -> bool:
    """Is some member of ``gamma`` a prefix of some member of ``other``?

    Decided by cancelling the communications of ``gamma`` one by one from
    the front of ``other``'s class.
    """
    rest = list(other.canonical)
    if len(gamma.canonical) > len(rest):
        return False
    for a in gamma.canonical:
        for i, c in enumerate(rest):
            if not _independent(c, a):
                if c != a:
                    return False
                del rest[i]
                break
        else:
            return False
    return True


def g_leq_bruteforce(gamma: GEvent, other: GEvent) -> bool:
    n = gamma.size
    mine = gamma.members()
    return any(m[:n] in mine for m in other.members())


def g_lt(gamma: GEvent, other: GEvent) -> bool:
    return gamma != other and g_leq(gamma, other)


def g_conflict(gamma: GEvent, other: GEvent) -> bool:
    return _conflict(gamma.canonical, other.canonical)


@lru_cache(maxsize=1 << 16)
def _projections(trace: tuple) -> dict:
    return {p: proj_trace(trace, p) for p in trace_participants(trace)}


def _conflict(s1: tuple, s2: tuple) -> bool:
    left, right = _projections(s1), _projections(s2)
    for p, eta in left.items():
        eta2 = right.get(p)
        if eta2 is not None and pe_conflict(eta, eta2):
            return True
    return False


# ---------------------------------------------------------------------------
# Event structure of a global type
# ---------------------------------------------------------------------------


def ge_events(g: GlobalType, bound: int) -> frozenset[GEvent]:
    """All g-events of ``g`` whose traces have length at most ``bound``.

    Solved as a least fixpoint over the node graph: the events of a choice
    are its root communications plus every event of a branch retrieved
    through the communication leading to that branch.
    """
    table = g._table
    nodes = table.nodes
    order = table.reachable(g._root)
    events: dict[int, set] = {n: set() for n in order}
    for n in order:
        head, branches = nodes[n]
        if head[0] == "->":
            events[n] = {GEvent((Communication(head[1], m, head[2]),)) for m, _ in branches}
    changed = True
    while changed:
        changed = False
        for n in reversed(order):
            head, branches = nodes[n]
            if head[0] != "->":
                continue
            acc = events[n]
            before = len(acc)
            for m, c in branches:
                alpha = Communication(head[1], m, head[2])
                for gamma in list(events[c]):
                    new = g_retrieval(alpha, gamma)
                    if new.size <= bound:
                        acc.add(new)
            if len(acc) != before:
                changed = True
    return frozenset(events[g._root])


def esg_exact(g: GlobalType, bound: int) -> bool:
    h = g.height()
    return h is not None and bound >= h


def esg(g: GlobalType, bound: int, *, check: bool = True) -> PrimeES:
    """Prime event structure of ``g`` restricted to events of size <= ``bound``."""
    if check:
        from .typesys import well_formed

        if not well_formed(g):
            raise NotWellFormed("global type is not well formed")
    return PrimeES.from_relations(
        ge_events(g, bound), g_leq, g_conflict, exact=esg_exact(g, bound)
    )


def gec(trace: Sequence[Communication]) -> list[GEvent]:
    trace = tuple(trace)
    return [ev(trace[: i + 1]) for i in range(len(trace))]


def g_to_n(gamma: GEvent) -> NEvent:
    """The n-event of the two partners of ``cm(gamma)``."""
    p, _, q = gamma.cm
    sigma = gamma.canonical
    return NEvent.of(
        LocatedEvent(p, proj_trace(sigma, p)), LocatedEvent(q, proj_trace(sigma, q))
    )


def gevent_json(gamma: GEvent) -> dict:
    return {
        "canonical": [str(c) for c in gamma.canonical],
        "cm": str(gamma.cm),
        "classSize": len(gamma.members()),
    }
