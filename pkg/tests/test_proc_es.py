from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpst_es import es_core as es
from mpst_es.proc_es import act, esp, p_events, p_events_exact, pe_conflict, pe_leq
from mpst_es.surface import parse_process
from mpst_es.syntax import IN, OUT, Action, inact

from corpus import PROCS
from strategies import processes


def acts(text):
    out = []
    for item in text.split("."):
        if "!" in item:
            peer, msg = item.split("!")
            out.append(Action(OUT, peer, msg))
        else:
            peer, msg = item.split("?")
            out.append(Action(IN, peer, msg))
    return tuple(out)


def test_stream_events_up_to_three():
    got = p_events(PROCS["P"], 3)
    want = {acts("q!l"), acts("q!l.q!l"), acts("q!l.q!l.q!l"),
            acts("q!lp"), acts("q!l.q!lp"), acts("q!l.q!l.q!lp")}
    assert got == want
    assert not p_events_exact(PROCS["P"], 3)


def test_small_cases():
    assert p_events(inact(), 4) == frozenset()
    assert p_events(parse_process("q?l3"), 1) == {acts("q?l3")}
    with pytest.raises(ValueError):
        p_events(inact(), 0)


def test_relations():
    assert pe_conflict(acts("q!l1.r!l"), acts("q!l2"))
    eta = acts("q!l1")
    assert pe_leq(eta, eta + acts("r!l"))
    assert not pe_conflict(eta, eta)
    assert act(acts("q!l1.r!l")) == Action(OUT, "r", "l")


def test_structure_shapes():
    s = esp(parse_process("q?l3"), 1)
    assert len(s.events) == 1 and not s.conflict and s.exact
    assert es.check_pes(esp(PROCS["P"], 3))


@given(processes, st.integers(1, 5))
@settings(max_examples=60)
def test_conflict_is_the_complement_of_order(p, k):
    s = esp(p, k)
    for a in s.events:
        for b in s.events:
            assert s.in_conflict(a, b) == (not pe_leq(a, b) and not pe_leq(b, a))


@given(processes, st.integers(1, 5))
@settings(max_examples=60)
def test_events_grow_with_the_bound(p, k):
    small, big = p_events(p, k), p_events(p, k + 1)
    assert small <= big
    h = p.height()
    if h is not None and k >= h:
        assert small == big and p_events_exact(p, k)
