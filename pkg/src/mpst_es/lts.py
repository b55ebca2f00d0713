"""Transition systems of networks and of global types."""

from __future__ import annotations

from typing import Iterable, Union

from .errors import NotEnabled, NotWellFormed
from .syntax import IN, OUT, Communication, GlobalType, Network, choice

# ---------------------------------------------------------------------------
# Networks
# ---------------------------------------------------------------------------


def net_enabled(n: Network) -> frozenset[Communication]:
    """Communications the network can perform in one synchronisation."""
    out = set()
    for p, proc in n.items():
        if proc.direction != OUT:
            continue
        q = proc.peer
        partner = n[q]
        if partner.direction != IN or partner.peer != p:
            continue
        offered = set(partner.messages)
        for m in proc.messages:
            if m in offered:
                out.add(Communication(p, m, q))
    return frozenset(out)


def net_step(n: Network, alpha: Communication) -> Network:
    p, m, q = alpha
    sender, receiver = n[p], n[q]
    if not (
        sender.direction == OUT
        and sender.peer == q
        and receiver.direction == IN
        and receiver.peer == p
        and m in sender.messages
        and m in receiver.messages
    ):
        raise NotEnabled(f"{alpha} is not enabled")
    return n.update({p: sender.branch(m), q: receiver.branch(m)})


# ---------------------------------------------------------------------------
# Global types
# ---------------------------------------------------------------------------


def _enabled_table(g: GlobalType) -> dict[int, frozenset[Communication]]:
    """Least solution of the Ecomm/Icomm equations on the reachable nodes.

    A communication is enabled at a node when it decorates a root edge, or
    when it is enabled in every branch and shares no participant with the
    root communication.  Iterating from the empty assignment yields exactly
    the labels with a finite derivation, so cycles never enable anything.
    """
    table = g._table
    key = ("enabled", g._root)
    hit = table.cache.get(key)
    if hit is not None:
        return hit
    nodes = table.nodes
    order = table.reachable(g._root)
    own = {}
    for n in order:
        head, branches = nodes[n]
        if head[0] == "->":
            own[n] = frozenset(Communication(head[1], m, head[2]) for m, _ in branches)
        else:
            own[n] = frozenset()
    enabled = dict(own)
    changed = True
    while changed:
        changed = False
        for n in reversed(order):
            head, branches = nodes[n]
            if not branches:
                continue
            root_parts = (head[1], head[2])
            common = None
            for _, c in branches:
                common = enabled[c] if common is None else common & enabled[c]
            inner = frozenset(
                a for a in common if a.sender not in root_parts and a.receiver not in root_parts
            )
            new = own[n] | inner
            if new != enabled[n]:
                enabled[n] = new
                changed = True
    table.cache[key] = enabled
    return enabled


def _require_well_formed(g: GlobalType) -> None:
    from .typesys import well_formed

    if not well_formed(g):
        raise NotWellFormed("global type is not well formed")


def global_enabled(g: GlobalType, *, check: bool = True) -> frozenset[Communication]:
    """Communications ``g`` can perform.  ``check=False`` skips the
    well-formedness precondition (for callers that already checked it)."""
    if check:
        _require_well_formed(g)
    return _enabled_table(g)[g._root]


def global_step(g: GlobalType, alpha: Communication, *, check: bool = True) -> GlobalType:
    if check:
        _require_well_formed(g)
    enabled = _enabled_table(g)
    if alpha not in enabled[g._root]:
        raise NotEnabled(f"{alpha} is not enabled")
    memo: dict[int, GlobalType] = {}

    def step(t: GlobalType) -> GlobalType:
        hit = memo.get(t._root)
        if hit is not None:
            return hit
        if t.sender == alpha.sender and t.receiver == alpha.receiver and alpha.message in t.messages:
            result = t.branch(alpha.message)
        else:
            # Icomm: every branch is enabled for alpha by the least solution
            result = choice(t.sender, t.receiver, {m: step(b) for m, b in t.branches.items()})
        memo[t._root] = result
        return result

    return step(g)


Term = Union[Network, GlobalType]


def enabled(term: Term, *, check: bool = True) -> frozenset[Communication]:
    if isinstance(term, Network):
        return net_enabled(term)
    return global_enabled(term, check=check)


def step(term: Term, alpha: Communication, *, check: bool = True) -> Term:
    if isinstance(term, Network):
        return net_step(term, alpha)
    return global_step(term, alpha, check=check)


def run(term: Term, trace: Iterable[Communication]) -> Term:
    """Fold ``step`` over a trace; ``NotEnabled.index`` marks the failing step."""
    if isinstance(term, GlobalType):
        _require_well_formed(term)
    for i, alpha in enumerate(trace):
        try:
            term = step(term, alpha, check=False)
        except NotEnabled as exc:
            raise NotEnabled(f"step {i}: {alpha} is not enabled", index=i) from exc
    return term
