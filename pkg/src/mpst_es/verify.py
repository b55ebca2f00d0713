"""Executable checks of the typing and event-structure theorems.

Every check returns a ``VerifyReport``; failures carry a counterexample
that can be replayed with the functions of the other modules.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Iterator, Sequence

from . import es_core as es
from .errors import GenerationExhausted, LabelCollision, NotEnabled, Undefined
from .global_es import (
    GEvent,
    class_members,
    esg,
    g_conflict,
    g_leq,
    g_leq_bruteforce,
    g_lt,
    g_residual,
    g_retrieval,
    g_to_n,
    gec,
    normal_form,
)
from .lts import global_enabled, global_step, net_enabled, net_step, run
from .net_es import (
    NEvent,
    causal_sets,
    de_events,
    esn,
    n_conflict,
    n_flow,
    n_residual,
    n_retrieval,
    nec,
    project_nevents,
    projection_map,
    _flip,
    proj_pevent,
)
from .proc_es import esp
from .surface import format_global, format_network
from .syntax import (
    Choice,
    Communication,
    GlobalType,
    Network,
    Nil,
    Process,
    Ref,
    _build,
    _Table,
    format_trace,
)
from .typesys import (
    INFINITE,
    _depths,
    project,
    typecheck,
    typing_failure,
    well_formed,
)

PASS = "pass"
FAIL = "fail"
PRECONDITION = "precondition-violated"


@dataclass
class VerifyReport:
    property: str
    verdict: str = PASS
    seed: int | None = None
    counterexample: dict | None = None
    checked: int = 0  # number of individual obligations discharged
    details: dict = field(default_factory=dict)  # witnesses, sizes; not part of the JSON

    @property
    def ok(self) -> bool:
        return self.verdict == PASS

    def to_json(self) -> dict:
        out = {"property": self.property, "seed": self.seed, "verdict": self.verdict}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


def _fail(report: VerifyReport, **details) -> VerifyReport:
    report.verdict = FAIL
    report.counterexample = {k: _jsonable(v) for k, v in details.items()}
    return report


def _jsonable(v):
    if isinstance(v, Network):
        return format_network(v)
    if isinstance(v, GlobalType):
        return format_global(v)
    if isinstance(v, (Communication, NEvent, GEvent)):
        return str(v)
    if isinstance(v, (list, tuple, set, frozenset)):
        items = [_jsonable(x) for x in v]
        return sorted(items, key=str) if isinstance(v, (set, frozenset)) else items
    return v


def _precondition(name: str, n: Network, g: GlobalType) -> VerifyReport | None:
    reason = typing_failure(n, g)
    if reason is None:
        return None
    return VerifyReport(name, PRECONDITION, counterexample={"reason": reason})


# ---------------------------------------------------------------------------
# Runs
# ---------------------------------------------------------------------------


def traces_of(term, max_len: int) -> Iterator[tuple]:
    """Every nonempty trace of length <= max_len of a network or global type."""
    if isinstance(term, Network):
        enabled, step = net_enabled, net_step
    else:
        def enabled(t):
            return global_enabled(t, check=False)

        def step(t, a):
            return global_step(t, a, check=False)

    stack = [((), term)]
    while stack:
        trace, t = stack.pop()
        if len(trace) >= max_len:
            continue
        for a in sorted(enabled(t)):
            nxt = trace + (a,)
            yield nxt
            stack.append((nxt, step(t, a)))


# ---------------------------------------------------------------------------
# Typing theorems
# ---------------------------------------------------------------------------


def check_subject_reduction(n: Network, g: GlobalType, max_len: int) -> VerifyReport:
    """Each network step is matched by the type and preserves typing."""
    report = VerifyReport("subject-reduction")
    reason = typing_failure(n, g)
    if reason is not None:
        # the starting pair is the empty run, so an untyped pair is a failure
        return _fail(report, network=n, type=g, trace=(), reason=reason)
    seen = {(n, g)}
    queue = deque([(n, g, ())])
    while queue:
        net, typ, trace = queue.popleft()
        if len(trace) >= max_len:
            continue
        type_moves = global_enabled(typ, check=False)
        for a in sorted(net_enabled(net)):
            report.checked += 1
            if a not in type_moves:
                return _fail(report, network=n, type=g, trace=trace + (a,),
                             reason="type cannot match the network step")
            net2, typ2 = net_step(net, a), global_step(typ, a, check=False)
            if not typecheck(net2, typ2):
                return _fail(report, network=n, type=g, trace=trace + (a,),
                             reason=typing_failure(net2, typ2))
            if (net2, typ2) not in seen:
                seen.add((net2, typ2))
                queue.append((net2, typ2, trace + (a,)))
    return report


def check_session_fidelity(n: Network, g: GlobalType, max_len: int) -> VerifyReport:
    """Each type step is matched by the network and preserves typing."""
    report = VerifyReport("session-fidelity")
    reason = typing_failure(n, g)
    if reason is not None:
        # the starting pair is the empty run, so an untyped pair is a failure
        return _fail(report, network=n, type=g, trace=(), reason=reason)
    seen = {(n, g)}
    queue = deque([(n, g, ())])
    while queue:
        net, typ, trace = queue.popleft()
        if len(trace) >= max_len:
            continue
        net_moves = net_enabled(net)
        for a in sorted(global_enabled(typ, check=False)):
            report.checked += 1
            if a not in net_moves:
                return _fail(report, network=n, type=g, trace=trace + (a,),
                             reason="network cannot match the type step")
            net2, typ2 = net_step(net, a), global_step(typ, a, check=False)
            if not typecheck(net2, typ2):
                return _fail(report, network=n, type=g, trace=trace + (a,),
                             reason=typing_failure(net2, typ2))
            if (net2, typ2) not in seen:
                seen.add((net2, typ2))
                queue.append((net2, typ2, trace + (a,)))
    return report


def default_progress_bound(g: GlobalType) -> int:
    """Sum of the finite depths over all reachable subterms and participants."""
    total = 0
    for p in g.participants():
        total += sum(d for d in _depths(g, p).values() if d != INFINITE)
    return max(1, int(total))


def check_progress(n: Network, g: GlobalType, bound: int | None = None) -> VerifyReport:
    """Every participant with a live process can eventually communicate."""
    pre = _precondition("progress", n, g)
    if pre:
        return pre
    if bound is None:
        bound = default_progress_bound(g)
    report = VerifyReport("progress")
    witnesses = {}
    for p in n.participants:
        report.checked += 1
        found = None
        seen = {n}
        queue = deque([(n, ())])
        while queue and found is None:
            net, trace = queue.popleft()
            if len(trace) >= bound:
                continue
            for a in sorted(net_enabled(net)):
                if p in a.participants:
                    found = trace + (a,)
                    break
                net2 = net_step(net, a)
                if net2 not in seen:
                    seen.add(net2)
                    queue.append((net2, trace + (a,)))
        if found is None:
            return _fail(report, network=n, type=g, participant=p, bound=bound,
                         reason="no run lets the participant communicate")
        witnesses[p] = format_trace(found)
    report.details = {"bound": bound, "witnesses": witnesses}
    return report


# ---------------------------------------------------------------------------
# Event structure theorems
# ---------------------------------------------------------------------------


def _sequences_by_config(s, max_len: int) -> dict[frozenset, list[tuple]]:
    out: dict[frozenset, list[tuple]] = {frozenset(): [()]}
    for seq in es.proving_sequences(s, max_len):
        out.setdefault(frozenset(seq), []).append(seq)
    return out


def _trace_label(seqs: list[tuple]) -> tuple | None:
    """Common normal form of the communication traces of proving sequences
    (None if they disagree)."""
    labels = {normal_form(tuple(e.cm for e in seq)) for seq in seqs}
    return labels.pop() if len(labels) == 1 else None


def check_isomorphism(n: Network, g: GlobalType, bound: int) -> VerifyReport:
    """Configuration domains of the network and of its type coincide up to
    size ``bound``, through the n-events/g-events of common traces."""
    pre = _precondition("isomorphism", n, g)
    if pre:
        return pre
    report = VerifyReport("isomorphism")
    sn, sg = esn(n, bound), esg(g, bound, check=False)
    dn, dg = es.enumerate_configs(sn, bound), es.enumerate_configs(sg, bound)
    seq_n, seq_g = _sequences_by_config(sn, bound), _sequences_by_config(sg, bound)
    phi: dict[frozenset, frozenset] = {}
    for x, seqs in seq_n.items():
        for seq in seqs:
            report.checked += 1
            y = frozenset(gec(tuple(e.cm for e in seq))) if seq else frozenset()
            if phi.setdefault(x, y) != y:
                return _fail(report, network=n, type=g, config=x, sequence=seq,
                             reason="two proving sequences of one configuration map apart")
    if set(phi) != dn.as_set:
        return _fail(report, network=n, type=g,
                     reason="proving sequences do not reach every network configuration")
    image = set(phi.values())
    if len(image) != len(phi):
        return _fail(report, network=n, type=g, reason="map is not injective")
    if image != dg.as_set:
        missing = sorted(dg.as_set - image, key=len)
        extra = sorted(image - dg.as_set, key=len)
        return _fail(report, network=n, type=g, reason="map is not onto the type domain",
                     missing=[sorted(map(str, c)) for c in missing[:3]],
                     extra=[sorted(map(str, c)) for c in extra[:3]])
    keys = list(phi)
    for a, b in combinations(keys, 2):
        report.checked += 1
        if (a <= b) != (phi[a] <= phi[b]) or (b <= a) != (phi[b] <= phi[a]):
            return _fail(report, network=n, type=g, reason="inclusion not preserved",
                         configs=[sorted(map(str, a)), sorted(map(str, b))])
    labels_n = {x: _trace_label(s) for x, s in seq_n.items()}
    labels_g = {y: _trace_label(s) for y, s in seq_g.items()}
    if None in labels_n.values() or None in labels_g.values():
        return _fail(report, network=n, type=g,
                     reason="proving sequences of one configuration give inequivalent traces")
    try:
        same = es.poset_iso(dn, dg, labels_n.__getitem__, labels_g.__getitem__)
    except LabelCollision as exc:
        return _fail(report, network=n, type=g, reason=str(exc))
    if not same:
        return _fail(report, network=n, type=g, reason="trace-labelled domains differ")
    exact = sn.exact and sg.exact and len(es.enumerate_configs(sn)) == len(dn)
    report.details = {"configurations": len(dn), "exact": exact}
    return report


def check_nec_theorem(n: Network, bound: int) -> VerifyReport:
    """Runs give proving sequences of n-events, and conversely."""
    report = VerifyReport("nec-proving-sequences")
    s = esn(n, bound)
    for trace in traces_of(n, bound):
        report.checked += 1
        if not es.is_proving_sequence(s, nec(trace)):
            return _fail(report, network=n, trace=trace,
                         reason="nec of a run is not a proving sequence")
    for seq in es.proving_sequences(s, bound):
        report.checked += 1
        trace = tuple(e.cm for e in seq)
        try:
            run(n, trace)
        except NotEnabled:
            return _fail(report, network=n, sequence=seq,
                         reason="proving sequence is not a run")
        if list(seq) != nec(trace):
            return _fail(report, network=n, sequence=seq,
                         reason="proving sequence differs from nec of its trace")
    return report


def check_gec_theorem(g: GlobalType, bound: int) -> VerifyReport:
    """Runs of the type give proving sequences of g-events, and conversely."""
    report = VerifyReport("gec-proving-sequences")
    s = esg(g, bound)
    for trace in traces_of(g, bound):
        report.checked += 1
        if not es.is_proving_sequence(s, gec(trace)):
            return _fail(report, type=g, trace=trace,
                         reason="gec of a run is not a proving sequence")
    for seq in es.proving_sequences(s, bound):
        report.checked += 1
        trace = tuple(e.cm for e in seq)
        try:
            run(g, trace)
        except NotEnabled:
            return _fail(report, type=g, sequence=seq, reason="proving sequence is not a run")
        if list(seq) != gec(trace):
            return _fail(report, type=g, sequence=seq,
                         reason="proving sequence differs from gec of its trace")
    return report


def check_network_structure(n: Network, bound: int) -> list[VerifyReport]:
    """Laws about the n-events of ``n``: sharing implies conflict, causal set
    size and uniqueness, projections of configurations, downward
    surjectivity, semantic conflict, and basic flow/conflict axioms."""
    de = de_events(n, bound)
    s = esn(n, bound)
    ne = s.events
    configs = es.enumerate_configs(s, bound)
    reports = []

    r = VerifyReport("sharing-implies-conflict")
    by_located: dict = {}
    for nu in de:
        for le in nu:
            by_located.setdefault(le, []).append(nu)
    for group in by_located.values():
        for a, b in combinations(group, 2):
            r.checked += 1
            if not n_conflict(a, b):
                _fail(r, network=n, events=[a, b])
                break
    reports.append(r)

    r = VerifyReport("flow-conflict-axioms")
    for a, b in s.flow:
        r.checked += 1
        if a == b:
            _fail(r, network=n, event=a, reason="flow not irreflexive")
    for a, b in s.conflict:
        r.checked += 1
        if a == b or (b, a) not in s.conflict:
            _fail(r, network=n, events=[a, b], reason="conflict not irreflexive/symmetric")
    reports.append(r)

    r = VerifyReport("causal-set-size")
    cs_cache = {}
    for nu in ne:
        sets = causal_sets(nu, ne)
        cs_cache[nu] = sets
        limit = len(nu.first.event) + len(nu.second.event) - 2
        for e in sets:
            r.checked += 1
            if len(e) > limit:
                _fail(r, network=n, event=nu, causal_set=e)
        if not sets:
            _fail(r, network=n, event=nu, reason="narrowed event without causal set")
    reports.append(r)

    r = VerifyReport("causal-set-uniqueness")
    for x in configs:
        for nu in x:
            r.checked += 1
            inside = [e for e in cs_cache[nu] if e <= x]
            if len(inside) != 1:
                _fail(r, network=n, config=x, event=nu, count=len(inside))
    reports.append(r)

    r = VerifyReport("projection-preserves-configurations")
    local = {p: esp(proc, bound) for p, proc in n.items()}
    for x in configs:
        for p in n.participants:
            r.checked += 1
            if not es.is_pes_config(local[p], project_nevents(x, p)):
                _fail(r, network=n, config=x, participant=p)
    reports.append(r)

    r = VerifyReport("downward-surjectivity")
    for p in n.participants:
        r.checked += 1
        if not es.downward_surjective(projection_map(ne, p), s, local[p]):
            _fail(r, network=n, participant=p)
    reports.append(r)

    r = VerifyReport("semantic-conflict")
    clash: dict = {}
    for a, b in combinations(ne, 2):
        if _mutual_clash(a, b):
            clash.setdefault(a, set()).add(b)
    for x in configs:
        r.checked += 1
        for a in x:
            hit = clash.get(a, set()) & x
            if hit:
                _fail(r, network=n, config=x, events=[a, min(hit)])
                break
    reports.append(r)
    return reports


def _mutual_clash(a: NEvent, b: NEvent) -> bool:
    for p, eta in a:
        for q, eta2 in b:
            if p == q:
                continue
            left, right = proj_pevent(eta, q), proj_pevent(eta2, p)
            k = min(len(left), len(right))
            if _flip(left[:k]) != right[:k]:
                return True
    return False


def _sample_pairs(items: Sequence, limit: int, rng: random.Random) -> list[tuple]:
    pairs = [(a, b) for a in items for b in items]
    if len(pairs) > limit:
        pairs = rng.sample(pairs, limit)
    return pairs


def check_net_operator_laws(n: Network, bound: int, seed: int = 0,
                            limit: int = 400) -> VerifyReport:
    """Round trips of retrieval/residual on n-events, and preservation of
    flow and conflict, on sampled events and communications."""
    r = VerifyReport("net-retrieval-residual-laws")
    rng = random.Random(seed)
    ne = sorted(esn(n, bound).events)
    alphabet = sorted({nu.cm for nu in ne})

    def post(nu, a):
        try:
            return n_residual(nu, a)
        except Undefined:
            return None

    for nu in ne:
        for a in alphabet:
            r.checked += 1
            back = post(nu, a)
            if back is not None and n_retrieval(back, a) != nu:
                return _fail(r, network=n, law=1, event=nu, comm=a)
            if post(n_retrieval(nu, a), a) != nu:
                return _fail(r, network=n, law=2, event=nu, comm=a)
    for nu, mu in _sample_pairs(ne, limit, rng):
        for a in alphabet:
            r.checked += 1
            pn, pm = n_retrieval(nu, a), n_retrieval(mu, a)
            qn, qm = post(nu, a), post(mu, a)
            if n_flow(nu, mu):
                if not n_flow(pn, pm):
                    return _fail(r, network=n, law=3, events=[nu, mu], comm=a)
                if qn is not None and qm is not None and not n_flow(qn, qm):
                    return _fail(r, network=n, law=4, events=[nu, mu], comm=a)
            if n_conflict(nu, mu):
                if not n_conflict(pn, pm):
                    return _fail(r, network=n, law=5, events=[nu, mu], comm=a)
                if qn is not None and qm is not None and not n_conflict(qn, qm):
                    return _fail(r, network=n, law=6, events=[nu, mu], comm=a)
            if n_conflict(pn, pm) and not n_conflict(nu, mu):
                return _fail(r, network=n, law=7, events=[nu, mu], comm=a)
    return r


def check_global_operator_laws(g: GlobalType, bound: int, seed: int = 0,
                               limit: int = 400) -> VerifyReport:
    """Round trips of retrieval/residual on g-events, preservation of
    causality and conflict, and commutation for independent communications."""
    r = VerifyReport("global-retrieval-residual-laws")
    rng = random.Random(seed)
    ge = sorted(esg(g, bound, check=False).events)
    alphabet = sorted({c for e in ge for c in e.canonical})

    def post(gamma, a):
        try:
            return g_residual(gamma, a)
        except Undefined:
            return None

    for gamma in ge:
        for a in alphabet:
            r.checked += 1
            back = post(gamma, a)
            if back is not None and g_retrieval(a, back) != gamma:
                return _fail(r, type=g, law=1, event=gamma, comm=a)
            if post(g_retrieval(a, gamma), a) != gamma:
                return _fail(r, type=g, law=2, event=gamma, comm=a)
            for b in alphabet:
                if a.participants & b.participants:
                    continue
                if g_retrieval(a, g_retrieval(b, gamma)) != g_retrieval(b, g_retrieval(a, gamma)):
                    return _fail(r, type=g, law=7, event=gamma, comms=[a, b])
                after = post(gamma, b)
                mixed = post(g_retrieval(a, gamma), b)
                if after is not None and mixed is not None and g_retrieval(a, after) != mixed:
                    return _fail(r, type=g, law=8, event=gamma, comms=[a, b])
    for x, y in _sample_pairs(ge, limit, rng):
        for a in alphabet:
            r.checked += 1
            px, py = g_retrieval(a, x), g_retrieval(a, y)
            if g_lt(x, y):
                if not g_lt(px, py):
                    return _fail(r, type=g, law=3, events=[x, y], comm=a)
                qx, qy = post(x, a), post(y, a)
                if qx is not None and qy is not None and not g_lt(qx, qy):
                    return _fail(r, type=g, law=4, events=[x, y], comm=a)
            if g_conflict(x, y) and not g_conflict(px, py):
                return _fail(r, type=g, law=5, events=[x, y], comm=a)
            if g_lt(x, py) and x != GEvent((a,)):
                qx = post(x, a)
                if qx is None or not g_lt(qx, y):
                    return _fail(r, type=g, law=6, events=[x, y], comm=a)
    return r


def check_type_structure(g: GlobalType, bound: int, seed: int = 0) -> list[VerifyReport]:
    """Prime axioms of the type's structure, the causality shortcut against
    brute force over classes, normal forms, and the g-event to n-event map."""
    s = esg(g, bound, check=False)
    reports = []
    r = VerifyReport("type-structure-is-prime")
    r.checked = 1
    bad = es.pes_violations(s)
    if bad:
        _fail(r, type=g, violations=bad[:5])
    reports.append(r)

    r = VerifyReport("causality-vs-bruteforce")
    rng = random.Random(seed)
    for x, y in _sample_pairs(list(s.events), 200, rng):
        r.checked += 1
        if g_leq(x, y) != g_leq_bruteforce(x, y):
            _fail(r, type=g, events=[x, y])
            break
    for e in s.events:
        r.checked += 1
        members = class_members(e.canonical)
        if min(members) != e.canonical or any(m[-1] != e.cm for m in members):
            _fail(r, type=g, event=e, reason="normal form or last communication differs")
            break
    reports.append(r)

    r = VerifyReport("g-to-n-events")
    net = Network({p: project(g, p) for p in g.participants()})
    de = de_events(net, bound)
    for e in s.events:
        r.checked += 1
        nu = g_to_n(e)
        if nu not in de or nu.cm != e.cm:
            _fail(r, type=g, event=e, image=nu)
            break
    reports.append(r)
    return reports


def check_oracles(s, max_size: int | None = None, limit: int = 12) -> VerifyReport:
    """Configurations by extension agree with brute-force subset filtering,
    and a subset is a configuration exactly when it admits a proving
    sequence; the separation property holds between nested configurations."""
    r = VerifyReport("bruteforce-oracles")
    if len(s.events) > limit:
        return r
    fast = es.enumerate_configs(s, max_size)
    slow = es.configs_by_subsets(s, max_size)
    r.checked += 1
    if fast.as_set != slow.as_set:
        return _fail(r, reason="extension and subset filtering disagree",
                     only_fast=[sorted(map(str, c)) for c in fast.as_set - slow.as_set][:3],
                     only_slow=[sorted(map(str, c)) for c in slow.as_set - fast.as_set][:3])
    top = 6 if max_size is None else min(6, max_size)
    for k in range(top + 1):
        for xs in combinations(s.events, k):
            r.checked += 1
            if es.is_config(s, xs) != es.admits_proving_sequence(s, xs):
                return _fail(r, subset=xs, reason="configuration vs proving sequence")
    for x in fast:
        for y in fast:
            if x < y:
                r.checked += 1
                if not any(es.is_config(s, x | {e}) for e in y - x):
                    return _fail(r, configs=[x, y], reason="separation fails")
    return r


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

PARTICIPANTS = ("p", "q", "r", "s", "t")
LABELS = ("a", "b", "c", "d")


def _candidate(rng: random.Random, size: int, parts: Sequence[str],
               rec_prob: float) -> GlobalType:
    equations: dict = {}
    counter = [0]
    used: set = set()

    def fresh() -> str:
        counter[0] += 1
        return f"G{counter[0]}"

    def gen(budget: int, ancestors: list[str]):
        if ancestors and rng.random() < rec_prob * (0.5 if budget > 1 else 1.0):
            return Ref(rng.choice(ancestors))
        if budget <= 0:
            return Nil()
        name = fresh()
        unused = [p for p in parts if p not in used]
        if unused and rng.random() < 0.6:
            s = rng.choice(unused)
            r = rng.choice([p for p in parts if p != s])
        else:
            s, r = rng.sample(list(parts), 2)
        used.update((s, r))
        k = rng.choices((1, 2, 3), weights=(5, 4, 1))[0]
        labels = sorted(rng.sample(LABELS, k))
        below = ancestors + [name]
        if k == 1 or rng.random() < 0.65:
            # branches share a continuation, possibly after a private exchange
            tail = gen(budget - 1, below)
            branches = []
            for m in labels:
                if rng.random() < 0.4:
                    aux = fresh()
                    equations[aux] = Choice((("->", r, s)), ((rng.choice(LABELS), tail),))
                    branches.append((m, Ref(aux)))
                else:
                    branches.append((m, tail))
        else:
            branches = [(m, gen(budget - 1, below)) for m in labels]
        equations[name] = Choice(("->", s, r), tuple(branches))
        return Ref(name)

    root = gen(size, [])
    if isinstance(root, Nil):
        equations["G0"] = Nil()
        root = Ref("G0")
    return _build(GlobalType, equations)[0][root.name].canonical()


def gen_well_formed(seed: int, size: int = 4, participants: Sequence[str] | None = None,
                    rec_prob: float = 0.3, budget: int = 500) -> GlobalType:
    """A random well-formed global type, deterministic in ``seed``."""
    rng = random.Random(seed)
    for _ in range(budget):
        parts = list(participants) if participants else \
            list(PARTICIPANTS[: rng.randint(2, len(PARTICIPANTS))])
        g = _candidate(rng, rng.randint(max(1, size // 2), max(1, size)), parts, rec_prob)
        if not g.is_end and well_formed(g):
            return g
    raise GenerationExhausted(f"no well-formed type after {budget} attempts (seed {seed})")


def _widen_inputs(proc: Process, rng: random.Random) -> Process:
    """Add an unused input branch to some input choices (still below ``proc``)."""
    nodes = list(proc.canonical_key())
    nil = len(nodes)
    nodes.append((("0",), ()))
    for i, (head, branches) in enumerate(nodes[:-1]):
        if head[0] == "?" and rng.random() < 0.5:
            used = {m for m, _ in branches}
            extra = next(f"x{j}" for j in range(10) if f"x{j}" not in used)
            nodes[i] = (head, tuple(sorted(branches + ((extra, nil),))))
    return Process(_Table(nodes), 0).canonical()


def gen_typed_pair(seed: int, size: int = 4, widen: bool = True, **kw) -> tuple[Network, GlobalType]:
    """A well-formed type with a network of its projections (inputs possibly
    widened, which keeps the network typable)."""
    g = gen_well_formed(seed, size, **kw)
    rng = random.Random(seed * 7919 + 1)
    procs = {}
    for p in sorted(g.participants()):
        proc = project(g, p)
        if widen and rng.random() < 0.3:
            proc = _widen_inputs(proc, rng)
        procs[p] = proc
    return Network(procs), g


# ---------------------------------------------------------------------------
# Shrinking
# ---------------------------------------------------------------------------


def _variants(g: GlobalType) -> Iterator[GlobalType]:
    nodes = list(g.canonical_key())
    for i, (head, branches) in enumerate(nodes):
        if head[0] != "->":
            continue
        options = []
        if i != 0:
            options.append(None)  # replace the node by end
        for j in range(len(branches)):
            if len(branches) > 1:
                options.append(("drop", j))
            options.append(("skip", j))
        for opt in options:
            new = list(nodes) + [(("end",), ())]
            if opt is None:
                new[i] = (("end",), ())
            elif opt[0] == "drop":
                new[i] = (head, branches[: opt[1]] + branches[opt[1] + 1:])
            else:
                target = branches[opt[1]][1]
                if target == i:
                    continue
                new = [
                    (h, tuple((m, target if c == i else c) for m, c in bs))
                    for h, bs in new
                ]
                new[i] = new[target]
            yield GlobalType(_Table(new), 0 if not (opt and opt[0] == "skip" and i == 0)
                             else branches[opt[1]][1]).canonical()


def shrink_type(g: GlobalType, fails: Callable[[GlobalType], bool], steps: int = 200) -> GlobalType:
    """Greedily simplify ``g`` while it stays well formed and ``fails`` holds."""
    for _ in range(steps):
        for h in _variants(g):
            if h != g and not h.is_end and well_formed(h) and fails(h):
                g = h
                break
        else:
            return g
    return g


def projections(g: GlobalType) -> Network:
    return Network({p: project(g, p) for p in g.participants()})


# ---------------------------------------------------------------------------
# Campaigns
# ---------------------------------------------------------------------------


def verify_pair(n: Network, g: GlobalType, bound: int = 5, max_len: int = 6,
                seed: int = 0) -> list[VerifyReport]:
    """Run every check on one typed pair."""
    reports = [
        check_subject_reduction(n, g, max_len),
        check_session_fidelity(n, g, max_len),
        check_progress(n, g),
        check_isomorphism(n, g, bound),
        check_nec_theorem(n, bound),
        check_gec_theorem(g, bound),
    ]
    reports += check_network_structure(n, bound)
    reports.append(check_net_operator_laws(n, bound, seed))
    reports.append(check_global_operator_laws(g, bound, seed))
    reports += check_type_structure(g, bound, seed)
    reports.append(check_oracles(esn(n, bound), bound))
    reports.append(check_oracles(esg(g, bound, check=False), bound))
    reports.append(check_lts_lemmas(g, max_len))
    reports.append(check_depth_decrease(g))
    for r in reports:
        r.seed = seed
    return reports


def check_lts_lemmas(g: GlobalType, max_len: int) -> VerifyReport:
    """Along runs of ``g``: enabled communications are those offered by both
    projections, well-formedness is kept, and third parties' projections
    are unchanged by a step."""
    r = VerifyReport("type-step-lemmas")
    seen = {g}
    queue = deque([(g, 0)])
    while queue:
        t, depth_ = queue.popleft()
        parts = sorted(t.participants())
        local = {p: project(t, p) for p in parts}
        offered = set()
        for p in parts:
            lp = local[p]
            if lp.direction == "!":
                lq = local.get(lp.peer)
                if lq is not None and lq.direction == "?" and lq.peer == p:
                    for m in lp.messages:
                        if m in lq.messages:
                            offered.add(Communication(p, m, lp.peer))
        enabled = global_enabled(t, check=False)
        r.checked += 1
        if enabled != offered:
            return _fail(r, type=t, enabled=enabled, offered=offered)
        if depth_ >= max_len:
            continue
        for a in sorted(enabled):
            t2 = global_step(t, a, check=False)
            r.checked += 1
            if not well_formed(t2):
                return _fail(r, type=t, comm=a, reason="well-formedness lost")
            for p in parts:
                if p not in a.participants:
                    if t2.participants() and p in t2.participants():
                        same = project(t2, p) == local[p]
                    else:
                        same = local[p].is_inact or project(t2, p) == local[p]
                    if not same:
                        return _fail(r, type=t, comm=a, participant=p,
                                     reason="third-party projection changed")
            if t2 not in seen:
                seen.add(t2)
                queue.append((t2, depth_ + 1))
    return r


def check_depth_decrease(g: GlobalType) -> VerifyReport:
    """At every choice of a well-formed type, a third participant occurring
    below it is strictly deeper there than in each branch."""
    r = VerifyReport("depth-decreases")
    nodes = g._table.nodes
    parts = g.node_participants()
    for p in sorted(g.participants()):
        depths = _depths(g, p)
        for n, here in parts.items():
            head, branches = nodes[n]
            if head[0] != "->" or p in head[1:] or p not in here:
                continue
            for m, c in branches:
                r.checked += 1
                if not depths[n] > depths[c]:
                    return _fail(r, type=g, participant=p, branch=m,
                                 depths=[depths[n], depths[c]])
    return r


@dataclass
class CampaignResult:
    pairs: int = 0
    reports: list[VerifyReport] = field(default_factory=list)

    def failures(self) -> list[VerifyReport]:
        return [r for r in self.reports if r.verdict != PASS]

    def by_property(self) -> dict[str, tuple[int, int]]:
        """property -> (passed, failed)"""
        out: dict[str, list[int]] = {}
        for r in self.reports:
            slot = out.setdefault(r.property, [0, 0])
            slot[0 if r.ok else 1] += 1
        return {k: (v[0], v[1]) for k, v in sorted(out.items())}


def run_campaign(seeds: Iterable[int], size: int = 4, bound: int = 5,
                 max_len: int = 6, shrink: bool = True) -> CampaignResult:
    result = CampaignResult()
    for seed in seeds:
        n, g = gen_typed_pair(seed, size)
        result.pairs += 1
        reports = verify_pair(n, g, bound, max_len, seed)
        for r in reports:
            if not r.ok and shrink:
                name = r.property
                small = shrink_type(
                    g,
                    lambda h: any(
                        x.property == name and not x.ok
                        for x in verify_pair(projections(h), h, bound, max_len, seed)
                    ),
                )
                again = [x for x in verify_pair(projections(small), small, bound, max_len, seed)
                         if x.property == name]
                r.counterexample = dict(r.counterexample or {})
                r.counterexample["shrunk_type"] = format_global(small)
                r.counterexample["shrunk_still_fails"] = any(not x.ok for x in again)
        result.reports.extend(reports)
    return result
