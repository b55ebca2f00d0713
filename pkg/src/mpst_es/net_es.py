"""Network events and the flow event structure of a network.

An n-event pairs two dual located p-events: the two halves of one
synchronisation together with the local histories of both partners.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product
from typing import Iterable, NamedTuple, Sequence

from .errors import NotBinary, Undefined
from .es_core import FlowES, PrimeES
from .proc_es import PEvent, format_pevent, p_events, pe_conflict, pe_lt
from .syntax import IN, OUT, Action, Communication, Network


class LocatedEvent(NamedTuple):
    owner: str
    event: PEvent

    def __str__(self) -> str:
        return f"{self.owner}::{format_pevent(self.event)}"


@lru_cache(maxsize=1 << 16)
def proj_pevent(eta: PEvent, p: str) -> tuple:
    """The directions and messages of the actions of ``eta`` addressed to ``p``."""
    return tuple((a.direction, a.message) for a in eta if a.peer == p)


def _flip(seq: tuple) -> tuple:
    return tuple((IN if d == OUT else OUT, m) for d, m in seq)


def dual_seq(left: tuple, right: tuple) -> bool:
    return len(left) == len(right) and _flip(left) == right


def dual_located(a: LocatedEvent, b: LocatedEvent) -> bool:
    p, eta = a
    q, eta2 = b
    if p == q or not eta or not eta2:
        return False
    if eta[-1].peer != q or eta2[-1].peer != p:
        return False
    return dual_seq(proj_pevent(eta, q), proj_pevent(eta2, p))


class NEvent(NamedTuple):
    """Two dual located events, stored in owner order."""

    first: LocatedEvent
    second: LocatedEvent

    @classmethod
    def of(cls, a: LocatedEvent, b: LocatedEvent) -> "NEvent":
        a, b = LocatedEvent(*a), LocatedEvent(*b)
        if not dual_located(a, b):
            raise ValueError(f"{a} and {b} are not dual")
        return cls(a, b) if a.owner < b.owner else cls(b, a)

    @property
    def loc(self) -> frozenset[str]:
        return frozenset((self.first.owner, self.second.owner))

    def component(self, p: str) -> PEvent | None:
        if self.first.owner == p:
            return self.first.event
        if self.second.owner == p:
            return self.second.event
        return None

    @property
    def cm(self) -> Communication:
        for le in self:
            a = le.event[-1]
            if a.direction == OUT:
                return Communication(le.owner, a.message, a.peer)
        raise ValueError("n-event without an output")  # pragma: no cover

    def __str__(self) -> str:
        return "{" + f"{self.first}, {self.second}" + "}"


def nevent(a: tuple, b: tuple) -> NEvent:
    return NEvent.of(LocatedEvent(*a), LocatedEvent(*b))


def n_flow(nu: NEvent, other: NEvent) -> bool:
    for p, eta in nu:
        eta2 = other.component(p)
        if eta2 is not None and pe_lt(eta, eta2):
            return True
    return False


def n_conflict(nu: NEvent, other: NEvent) -> bool:
    for p, eta in nu:
        for q, eta2 in other:
            if p == q:
                if pe_conflict(eta, eta2):
                    return True
            else:
                left, right = proj_pevent(eta, q), proj_pevent(eta2, p)
                if len(left) == len(right) and not dual_seq(left, right):
                    return True
    return False


# ---------------------------------------------------------------------------
# Causal sets and narrowing
# ---------------------------------------------------------------------------


def _index(events: Iterable[NEvent]) -> dict:
    out: dict = {}
    for nu in events:
        for le in nu:
            out.setdefault(le, []).append(nu)
    return out


def _slots(nu: NEvent) -> list[LocatedEvent]:
    return [LocatedEvent(p, eta[:k]) for p, eta in nu for k in range(1, len(eta))]


def _causal_search(nu: NEvent, index: dict, first_only: bool):
    slots = _slots(nu)
    found: list[frozenset] = []
    seen: set[frozenset] = set()

    def covers(chosen: list, slot: LocatedEvent) -> bool:
        return any(slot in c for c in chosen)

    def minimal(chosen: list) -> bool:
        for i in range(len(chosen)):
            rest = chosen[:i] + chosen[i + 1:]
            if all(covers(rest, s) for s in slots):
                return False
        return True

    def search(i: int, chosen: list) -> bool:
        if i == len(slots):
            e = frozenset(chosen)
            if e not in seen and minimal(chosen):
                seen.add(e)
                found.append(e)
                return first_only
            return False
        slot = slots[i]
        if covers(chosen, slot):
            return search(i + 1, chosen)
        for cand in index.get(slot, ()):
            if cand == nu or cand in chosen:
                continue
            if n_conflict(cand, nu) or n_conflict(cand, cand):
                continue
            if any(n_conflict(cand, c) for c in chosen):
                continue
            chosen.append(cand)
            if search(i + 1, chosen):
                return True
            chosen.pop()
        return False

    if n_conflict(nu, nu):
        return found
    search(0, [])
    return found


def causal_sets(nu: NEvent, events: Iterable[NEvent]) -> set[frozenset]:
    """Every minimal conflict-free set covering the proper prefixes of ``nu``."""
    return set(_causal_search(nu, _index(events), first_only=False))


def has_causal_set(nu: NEvent, events: Iterable[NEvent], index: dict | None = None) -> bool:
    if index is None:
        index = _index(events)
    return bool(_causal_search(nu, index, first_only=True))


def narrowing(events: Iterable[NEvent]) -> frozenset[NEvent]:
    """Greatest subset in which every event has a causal set."""
    current = frozenset(events)
    while True:
        index = _index(current)
        kept = frozenset(nu for nu in current if has_causal_set(nu, current, index))
        if kept == current:
            return current
        current = kept


# ---------------------------------------------------------------------------
# Event structure of a network
# ---------------------------------------------------------------------------


def de_events(n: Network, bound: int) -> frozenset[NEvent]:
    """All dual pairs of located p-events of length at most ``bound``."""
    pes = {p: p_events(proc, bound) for p, proc in n.items()}
    # by owner: (peer of last action, projection on that peer) -> events
    lookup: dict = {}
    for q, evs in pes.items():
        table = lookup.setdefault(q, {})
        for eta in evs:
            peer = eta[-1].peer
            table.setdefault((peer, proj_pevent(eta, peer)), []).append(eta)
    out = set()
    for p, evs in pes.items():
        for eta in evs:
            q = eta[-1].peer
            if q not in lookup or q < p:
                continue
            for eta2 in lookup[q].get((p, _flip(proj_pevent(eta, q))), ()):
                out.add(NEvent(LocatedEvent(p, eta), LocatedEvent(q, eta2)))
    return frozenset(out)


def esn_exact(n: Network, bound: int) -> bool:
    heights = [proc.height() for _, proc in n.items()]
    return all(h is not None and bound >= h for h in heights)


def ne_events(n: Network, bound: int) -> frozenset[NEvent]:
    return narrowing(de_events(n, bound))


def esn(n: Network, bound: int) -> FlowES:
    """Flow event structure of ``n`` over p-events of length <= ``bound``.

    Configurations with at most ``bound`` events coincide with those of the
    untruncated structure; ``exact`` reports whether the event set is complete.
    """
    return FlowES.from_relations(
        ne_events(n, bound), n_flow, n_conflict, exact=esn_exact(n, bound)
    )


def is_binary(n: Network) -> bool:
    parts = n.participants
    if len(parts) != 2:
        return False
    p, q = parts
    return n[p].participants() <= {q} and n[q].participants() <= {p}


def esn_star(n: Network, bound: int) -> PrimeES:
    """For two-party networks: events with the transitive closure of flow."""
    if not is_binary(n):
        raise NotBinary("esn_star needs exactly two participants talking to each other")
    s = esn(n, bound)
    lt = set(s.flow)
    changed = True
    while changed:
        changed = False
        for a, b in list(lt):
            for c in s.preds.get(a, ()):
                if (c, b) not in lt:
                    lt.add((c, b))
                    changed = True
    return PrimeES(s.events, frozenset(lt), s.conflict, s.exact)


def project_nevents(events: Iterable[NEvent], p: str) -> frozenset[PEvent]:
    return frozenset(eta for nu in events if (eta := nu.component(p)) is not None)


def projection_map(events: Iterable[NEvent], p: str) -> dict[NEvent, PEvent]:
    """The partial map sending an n-event to its component owned by ``p``."""
    return {nu: eta for nu in events if (eta := nu.component(p)) is not None}


# ---------------------------------------------------------------------------
# Retrieval and residual
# ---------------------------------------------------------------------------


def atomic(alpha: Communication) -> NEvent:
    """The n-event of a communication performed from the start."""
    p, m, q = alpha
    return NEvent.of(
        LocatedEvent(p, (Action(OUT, q, m),)), LocatedEvent(q, (Action(IN, p, m),))
    )


def _pre_located(le: LocatedEvent, alpha: Communication) -> LocatedEvent:
    a = alpha.project(le.owner)
    return le if a is None else LocatedEvent(le.owner, (a,) + le.event)


def _post_located(le: LocatedEvent, alpha: Communication) -> LocatedEvent:
    a = alpha.project(le.owner)
    if a is None:
        return le
    if len(le.event) < 2 or le.event[0] != a:
        raise Undefined(f"{le} does not start with {a} or would become empty")
    return LocatedEvent(le.owner, le.event[1:])


def n_retrieval(nu: NEvent, alpha: Communication) -> NEvent:
    """The event ``nu`` seen before ``alpha`` happened."""
    return NEvent.of(_pre_located(nu.first, alpha), _pre_located(nu.second, alpha))


def n_residual(nu: NEvent, alpha: Communication) -> NEvent:
    """The event ``nu`` seen after ``alpha`` happened; raises ``Undefined``."""
    return NEvent.of(_post_located(nu.first, alpha), _post_located(nu.second, alpha))


def n_retrieval_trace(nu: NEvent, trace: Sequence[Communication]) -> NEvent:
    for alpha in reversed(trace):
        nu = n_retrieval(nu, alpha)
    return nu


def n_residual_trace(nu: NEvent, trace: Sequence[Communication]) -> NEvent:
    for alpha in trace:
        nu = n_residual(nu, alpha)
    return nu


def nec(trace: Sequence[Communication]) -> list[NEvent]:
    """The n-events of the successive communications of a network run."""
    trace = tuple(trace)
    return [n_retrieval_trace(atomic(a), trace[:i]) for i, a in enumerate(trace)]


def nevent_json(nu: NEvent) -> dict:
    return {
        "loc": [nu.first.owner, nu.second.owner],
        "events": {le.owner: [str(a) for a in le.event] for le in nu},
        "cm": str(nu.cm),
    }
