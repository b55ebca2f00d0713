"""Prime and flow event structures, configurations and proving sequences.

Events can be any hashable, totally ordered values; the order only fixes
canonical output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .errors import LabelCollision


def _symmetric(pairs: Iterable[tuple]) -> frozenset:
    out = set()
    for a, b in pairs:
        out.add((a, b))
        out.add((b, a))
    return frozenset(out)


class _Structure:
    events: tuple
    conflict: frozenset

    @cached_property
    def event_set(self) -> frozenset:
        return frozenset(self.events)

    @cached_property
    def conflicts_of(self) -> dict:
        out: dict = {e: set() for e in self.events}
        for a, b in self.conflict:
            out[a].add(b)
        return {e: frozenset(s) for e, s in out.items()}

    def in_conflict(self, a, b) -> bool:
        return (a, b) in self.conflict

    @property
    def preds(self) -> dict:
        """Events that must be justified before each event can occur."""
        raise NotImplementedError

    @property
    def arrows(self) -> frozenset:
        raise NotImplementedError


@dataclass(frozen=True)
class PrimeES(_Structure):
    """``lt`` holds the strict causality pairs ``(a, b)`` with ``a < b``;
    ``conflict`` is stored symmetrically."""

    events: tuple
    lt: frozenset
    conflict: frozenset
    exact: bool = field(default=True, compare=False)

    @classmethod
    def from_relations(cls, events: Iterable, leq: Callable, conflict: Callable,
                       exact: bool = True) -> "PrimeES":
        evs = tuple(sorted(set(events)))
        lt = frozenset((a, b) for a in evs for b in evs if a != b and leq(a, b))
        cf = _symmetric((a, b) for a, b in combinations(evs, 2) if conflict(a, b))
        cf |= frozenset((a, a) for a in evs if conflict(a, a))
        return cls(evs, lt, cf, exact)

    def leq(self, a, b) -> bool:
        return a == b or (a, b) in self.lt

    @cached_property
    def preds(self) -> dict:
        out: dict = {e: set() for e in self.events}
        for a, b in self.lt:
            out[b].add(a)
        return {e: frozenset(s) for e, s in out.items()}

    @property
    def arrows(self) -> frozenset:
        return self.lt

    def immediate_lt(self) -> frozenset:
        """Covering pairs of the causality order."""
        return frozenset(
            (a, b) for a, b in self.lt
            if not any((a, c) in self.lt and (c, b) in self.lt for c in self.events)
        )

    def immediate_conflict(self) -> frozenset:
        """Conflicts not inherited from a conflict between causes."""
        out = set()
        for a, b in self.conflict:
            inherited = any(
                (x, b) in self.conflict for x in self.preds[a]
            ) or any((a, y) in self.conflict for y in self.preds[b])
            if not inherited:
                out.add((a, b))
        return frozenset(out)


@dataclass(frozen=True)
class FlowES(_Structure):
    """``flow`` holds pairs ``(a, b)`` with ``a`` a possible direct cause of ``b``."""

    events: tuple
    flow: frozenset
    conflict: frozenset
    exact: bool = field(default=True, compare=False)

    @classmethod
    def from_relations(cls, events: Iterable, flow: Callable, conflict: Callable,
                       exact: bool = True) -> "FlowES":
        evs = tuple(sorted(set(events)))
        fl = frozenset((a, b) for a in evs for b in evs if a != b and flow(a, b))
        cf = _symmetric((a, b) for a, b in combinations(evs, 2) if conflict(a, b))
        cf |= frozenset((a, a) for a in evs if conflict(a, a))
        return cls(evs, fl, cf, exact)

    @cached_property
    def preds(self) -> dict:
        out: dict = {e: set() for e in self.events}
        for a, b in self.flow:
            out[b].add(a)
        return {e: frozenset(s) for e, s in out.items()}

    @property
    def arrows(self) -> frozenset:
        return self.flow


def as_flow(s: PrimeES) -> FlowES:
    """A prime structure read as a flow structure (flow = strict causality)."""
    return FlowES(s.events, s.lt, s.conflict, s.exact)


# ---------------------------------------------------------------------------
# Structural checks
# ---------------------------------------------------------------------------


def pes_violations(s: PrimeES) -> list[str]:
    """Human-readable list of broken prime event structure axioms."""
    bad = []
    lt, cf = s.lt, s.conflict
    succ: dict = {e: set() for e in s.events}
    for a, b in lt:
        succ[a].add(b)
    for a, b in lt:
        if a == b:
            bad.append(f"causality not irreflexive at {a}")
        if (b, a) in lt:
            bad.append(f"causality not antisymmetric on {a}, {b}")
        for c in succ[b] - succ[a]:
            bad.append(f"causality not transitive on {a} < {b} < {c}")
    cf_of = s.conflicts_of
    for a, b in cf:
        if a == b:
            bad.append(f"conflict not irreflexive at {a}")
        if (b, a) not in cf:
            bad.append(f"conflict not symmetric on {a}, {b}")
        for c in succ[b] - cf_of[a]:
            bad.append(f"conflict not hereditary: {a} # {b} <= {c}")
        if (a, b) in lt or (b, a) in lt:
            bad.append(f"{a} and {b} are both ordered and in conflict")
    return bad


def check_pes(s: PrimeES) -> bool:
    return not pes_violations(s)


def fes_violations(s: FlowES) -> list[str]:
    bad = []
    for a, b in s.flow:
        if a == b:
            bad.append(f"flow not irreflexive at {a}")
    for a, b in s.conflict:
        if (b, a) not in s.conflict:
            bad.append(f"conflict not symmetric on {a}, {b}")
    return bad


# ---------------------------------------------------------------------------
# Configurations and proving sequences
# ---------------------------------------------------------------------------


def _conflict_free(s: _Structure, xs: Iterable) -> bool:
    xs = list(xs)
    for i, a in enumerate(xs):
        cf = s.conflicts_of.get(a, frozenset())
        if a in cf:
            return False
        for b in xs[i + 1:]:
            if b in cf:
                return False
    return True


def is_pes_config(s: PrimeES, x: Iterable) -> bool:
    x = frozenset(x)
    if not x <= s.event_set:
        return False
    if any(not s.preds[e] <= x for e in x):
        return False
    return _conflict_free(s, x)


def _acyclic(pairs: Iterable[tuple], nodes: Iterable) -> bool:
    succ: dict = {n: [] for n in nodes}
    for a, b in pairs:
        succ[a].append(b)
    state: dict = {}
    for start in succ:
        if start in state:
            continue
        state[start] = 1
        stack = [(start, iter(succ[start]))]
        while stack:
            n, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                state[n] = 2
                stack.pop()
                continue
            st = state.get(nxt)
            if st == 1:
                return False
            if st is None:
                state[nxt] = 1
                stack.append((nxt, iter(succ[nxt])))
    return True


def is_fes_config(s: FlowES, x: Iterable) -> bool:
    x = frozenset(x)
    if not x <= s.event_set:
        return False
    if not _conflict_free(s, x):
        return False
    for e in x:
        causes = s.preds[e]
        for c in causes:
            if c in x:
                continue
            if not any(d in x for d in s.conflicts_of[c] & causes):
                return False
    return _acyclic(((a, b) for a, b in s.flow if a in x and b in x), x)


def is_config(s: _Structure, x: Iterable) -> bool:
    if isinstance(s, PrimeES):
        return is_pes_config(s, x)
    return is_fes_config(s, x)


def _justified(s: _Structure, done: frozenset, e) -> bool:
    """Can ``e`` occur right after the events in ``done``?"""
    causes = s.preds[e]
    missing = causes - done
    if not missing:
        return True
    if isinstance(s, PrimeES):
        return False
    for c in missing:
        if not any(d in done for d in s.conflicts_of[c] & causes):
            return False
    return True


def _can_extend(s: _Structure, done: frozenset, e) -> bool:
    if e in done:
        return False
    cf = s.conflicts_of[e]
    if e in cf or not cf.isdisjoint(done):
        return False
    return _justified(s, done, e)


def is_proving_sequence(s: _Structure, seq: Sequence) -> bool:
    done: frozenset = frozenset()
    for e in seq:
        if e not in s.event_set or not _can_extend(s, done, e):
            return False
        done = done | {e}
    return True


@dataclass(frozen=True)
class ConfigDomain:
    """Configurations (as frozensets) in canonical order: by size, then events."""

    configs: tuple

    @classmethod
    def of(cls, configs: Iterable[frozenset]) -> "ConfigDomain":
        return cls(tuple(sorted(set(configs), key=lambda c: (len(c), sorted(c)))))

    def __len__(self) -> int:
        return len(self.configs)

    def __iter__(self) -> Iterator[frozenset]:
        return iter(self.configs)

    def __contains__(self, x) -> bool:
        return frozenset(x) in self.as_set

    @cached_property
    def as_set(self) -> frozenset:
        return frozenset(self.configs)

    def maximal(self) -> list[frozenset]:
        return [c for c in self.configs if not any(c < d for d in self.configs)]


def enumerate_configs(s: _Structure, max_size: int | None = None) -> ConfigDomain:
    """All configurations with at most ``max_size`` events, grown one
    justified event at a time from the empty set."""
    layer = {frozenset()}
    found = set(layer)
    size = 0
    while layer and (max_size is None or size < max_size):
        nxt = set()
        for x in layer:
            for e in s.events:
                if _can_extend(s, x, e):
                    y = x | {e}
                    if y not in found:
                        found.add(y)
                        nxt.add(y)
        layer = nxt
        size += 1
    return ConfigDomain.of(found)


def proving_sequences(s: _Structure, max_len: int | None = None) -> Iterator[tuple]:
    """Every nonempty proving sequence of length at most ``max_len``."""

    def grow(prefix: tuple, done: frozenset):
        if max_len is not None and len(prefix) >= max_len:
            return
        for e in s.events:
            if _can_extend(s, done, e):
                seq = prefix + (e,)
                yield seq
                yield from grow(seq, done | {e})

    yield from grow((), frozenset())


def configs_by_subsets(s: _Structure, max_size: int | None = None) -> ConfigDomain:
    """Reference enumeration: filter every subset through the definition."""
    evs = s.events
    top = len(evs) if max_size is None else min(max_size, len(evs))
    found = []
    for k in range(top + 1):
        for xs in combinations(evs, k):
            if is_config(s, xs):
                found.append(frozenset(xs))
    return ConfigDomain.of(found)


def admits_proving_sequence(s: _Structure, x: Iterable) -> bool:
    """Reference check: some ordering of ``x`` is a proving sequence."""
    x = frozenset(x)
    if not x <= s.event_set:
        return False
    seen: set = set()

    def grow(done: frozenset) -> bool:
        if done == x:
            return True
        if done in seen:
            return False
        seen.add(done)
        return any(_can_extend(s, done, e) and grow(done | {e}) for e in x - done)

    return grow(frozenset())


def poset_iso(d1: ConfigDomain, d2: ConfigDomain,
              label1: Callable[[frozenset], Hashable],
              label2: Callable[[frozenset], Hashable]) -> bool:
    """Do equal labels give an inclusion-preserving bijection?"""
    def index(d, label):
        out = {}
        for c in d:
            k = label(c)
            if k in out:
                raise LabelCollision(f"two configurations share label {k!r}")
            out[k] = c
        return out

    i1, i2 = index(d1, label1), index(d2, label2)
    if set(i1) != set(i2):
        return False
    keys = list(i1)
    for a in keys:
        for b in keys:
            if (i1[a] <= i1[b]) != (i2[a] <= i2[b]):
                return False
    return True


def downward_surjective(f: Mapping, s0: _Structure, s1: _Structure) -> bool:
    """Every direct cause in ``s1`` of an image is itself an image."""
    image = set(f.values())
    for e0, e1 in f.items():
        if e0 not in s0.event_set:
            return False
        if not s1.preds[e1] <= image:
            return False
    return True


# ---------------------------------------------------------------------------
# DOT output
# ---------------------------------------------------------------------------


def to_dot(s: _Structure, name: str = "ES", label: Callable = str) -> str:
    """Graphviz text: solid arrows for causality/flow, dashed lines for conflict
    (immediate ones only for prime structures)."""
    ids = {e: f"e{i}" for i, e in enumerate(s.events)}
    lines = [f"digraph {name} {{", "  node [shape=box];"]
    for e in s.events:
        text = str(label(e)).replace('"', '\\"')
        lines.append(f'  {ids[e]} [label="{text}"];')
    if isinstance(s, PrimeES):
        arrows, conflicts = s.immediate_lt(), s.immediate_conflict()
    else:
        arrows, conflicts = s.flow, s.conflict
    for a, b in sorted(arrows):
        lines.append(f"  {ids[a]} -> {ids[b]};")
    for a, b in sorted(conflicts):
        if a < b:
            lines.append(f"  {ids[a]} -> {ids[b]} [style=dashed, dir=none];")
        elif a == b:
            lines.append(f"  {ids[a]} -> {ids[a]} [style=dashed, dir=none];")
    lines.append("}")
    return "\n".join(lines)
