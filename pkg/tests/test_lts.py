from __future__ import annotations

import pytest
from hypothesis import given, settings

from mpst_es.errors import NotEnabled, NotWellFormed
from mpst_es.lts import global_enabled, global_step, net_enabled, net_step, run
from mpst_es.surface import parse_global, parse_network
from mpst_es.syntax import Network, parse_trace
from mpst_es.typesys import project
from mpst_es.verify import check_lts_lemmas, gen_well_formed

from corpus import GLOBALS, NETS
from strategies import seeds


def c(text):
    (alpha,) = parse_trace(text)
    return alpha


def test_network_enabled_examples():
    assert net_enabled(NETS["Ring"]) == frozenset()
    assert net_enabled(Network()) == frozenset()
    assert net_enabled(NETS["Chain"]) == {c("p->q:l1")}


def test_network_steps():
    after = net_step(NETS["Chain"], c("p->q:l1"))
    assert after == parse_network("q :: r!l2 | r :: q?l2; s!l3 | s :: r?l3")
    with pytest.raises(NotEnabled):
        net_step(NETS["Chain"], c("q->r:l2"))
    assert net_step(NETS["Stream"], c("p->q:l")) == NETS["Stream"]


def test_global_enabled_examples():
    assert global_enabled(GLOBALS["Left"]) == {c("p->q:l1"), c("r->s:l2")}
    assert global_enabled(parse_global("p->q:l")) == {c("p->q:l")}
    # p->r:l occurs in both branches but shares p with the root
    assert global_enabled(GLOBALS["Fork"]) == {c("p->q:l1"), c("p->q:l2")}


def test_global_steps():
    g = GLOBALS["Loop"]
    assert global_step(g, c("p->q:l2"), check=False) == g
    assert global_step(GLOBALS["Left"], c("r->s:l2")) == parse_global("p->q:l1; r->p:l3")
    with pytest.raises(NotEnabled):
        global_step(GLOBALS["Left"], c("r->p:l3"))


def test_unbounded_type_is_rejected():
    with pytest.raises(NotWellFormed):
        global_enabled(GLOBALS["Wake"])


def test_run():
    n = NETS["Chain"]
    assert run(n, ()) == n
    assert run(n, parse_trace("p->q:l1,q->r:l2,r->s:l3")) == Network()
    with pytest.raises(NotEnabled) as info:
        run(NETS["Ring"], parse_trace("p->q:lp"))
    assert info.value.index == 0
    with pytest.raises(NotEnabled) as info:
        run(n, parse_trace("p->q:l1,r->s:l3"))
    assert info.value.index == 1


def test_icomm_through_recursion_is_not_enabled():
    # r->s:x waits behind a loop that may never exit
    g = parse_global("G", "global G = p->q:{a. G, b. r->s:x}")
    assert global_enabled(g, check=False) == {c("p->q:a"), c("p->q:b")}


@given(seeds)
@settings(max_examples=40, deadline=None)
def test_enabled_iff_offered_by_projections(seed):
    g = gen_well_formed(seed, 5)
    assert check_lts_lemmas(g, 4).ok


@given(seeds)
@settings(max_examples=40, deadline=None)
def test_steps_are_deterministic(seed):
    g = gen_well_formed(seed, 4)
    n = Network({p: project(g, p) for p in g.participants()})
    for a in sorted(net_enabled(n)):
        assert net_step(n, a) == net_step(n, a)
    for a in sorted(global_enabled(g)):
        assert global_step(g, a) == global_step(g, a)
