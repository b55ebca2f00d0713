"""Process events and the prime event structure of a single process.

A process event (p-event) is a nonempty tuple of ``Action`` values: the
labels met on the path from the root of the process tree to an edge.
"""

from __future__ import annotations

from .es_core import PrimeES
from .syntax import Action, Process

PEvent = tuple  # tuple[Action, ...], nonempty


def act(eta: PEvent) -> Action:
    """The action a p-event stands for: its last one."""
    return eta[-1]


def pe_leq(eta: PEvent, other: PEvent) -> bool:
    """Prefix order."""
    return len(eta) <= len(other) and other[: len(eta)] == eta


def pe_lt(eta: PEvent, other: PEvent) -> bool:
    return len(eta) < len(other) and other[: len(eta)] == eta


def pe_conflict(eta: PEvent, other: PEvent) -> bool:
    """Neither is a prefix of the other."""
    n = min(len(eta), len(other))
    return eta[:n] != other[:n]


def p_events(p: Process, bound: int) -> frozenset:
    """All p-events of ``p`` of length at most ``bound``."""
    if bound < 1:
        raise ValueError("bound must be at least 1")
    out = set()
    frontier = [((), p)]
    for _ in range(bound):
        nxt = []
        for prefix, proc in frontier:
            for a in proc.actions():
                eta = prefix + (a,)
                out.add(eta)
                nxt.append((eta, proc.branch(a.message)))
        frontier = nxt
    return frozenset(out)


def p_events_exact(p: Process, bound: int) -> bool:
    """Is ``p_events(p, bound)`` the full (finite) set of p-events?"""
    h = p.height()
    return h is not None and bound >= h


def esp(p: Process, bound: int) -> PrimeES:
    """Prime event structure of ``p``, truncated to p-events of length <= bound."""
    return PrimeES.from_relations(
        p_events(p, bound), pe_leq, pe_conflict, exact=p_events_exact(p, bound)
    )


def format_pevent(eta: PEvent) -> str:
    return ".".join(str(a) for a in eta)
