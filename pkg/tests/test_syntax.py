from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpst_es.errors import (
    DuplicateBranchLabel,
    EmptyChoice,
    NonContractive,
    SelfCommunication,
    UndefinedName,
    ValidationError,
)
from mpst_es.syntax import (
    IN,
    OUT,
    Action,
    Choice,
    Communication,
    Network,
    Nil,
    Ref,
    build_global,
    build_process,
    choice,
    comm,
    end,
    inact,
    parse_trace,
    participants_global,
    process_equal,
    receive,
    send,
    trace_participants,
)
from mpst_es.global_es import g_traces

from corpus import GLOBALS, PROCS
from strategies import processes, random_process, seeds, unfold


def out(peer, *branches):
    return Choice((OUT, peer), tuple(branches))


# -- construction -----------------------------------------------------------


def test_recursive_output_choice_builds():
    p = build_process({"P": out("q", ("l", Ref("P")), ("lp", Nil()))})
    assert p.is_recursive()
    assert p.branch("l") == p
    assert p.branch("lp").is_inact
    assert [str(a) for a in p.actions()] == ["q!l", "q!lp"]


def test_self_alias_is_not_contractive():
    with pytest.raises(NonContractive):
        build_process({"P": Ref("P")})


def test_alias_cycle_is_not_contractive():
    with pytest.raises(NonContractive):
        build_process({"P": Ref("Q"), "Q": Ref("P")})


def test_alias_to_guarded_name_is_accepted():
    p = build_process({"P": Ref("Q"), "Q": out("q", ("l", Ref("P")))})
    assert p == build_process({"Q": out("q", ("l", Ref("Q")))})


def test_duplicate_branch_label():
    with pytest.raises(DuplicateBranchLabel):
        build_process({"P": out("q", ("l", Nil()), ("l", Nil()))})


def test_undefined_name_and_empty_choice():
    with pytest.raises(UndefinedName):
        build_process({"P": out("q", ("l", Ref("Nope")))})
    with pytest.raises(EmptyChoice):
        build_process({"P": out("q")})
    with pytest.raises(EmptyChoice):
        send("q", {})


def test_global_examples():
    g = GLOBALS["Loop"]
    assert g.is_recursive() and g.participants() == {"p", "q", "r"}
    with pytest.raises(SelfCommunication):
        build_global({"G": Choice(("->", "p", "p"), (("l", Nil()),))})
    assert end().participants() == frozenset()
    assert participants_global(choice("p", "q", {"l": end()})) == {"p", "q"}


def test_comm_rejects_self_communication():
    with pytest.raises(SelfCommunication):
        comm("p", "l", "p")


# -- traces ---------------------------------------------------------------


def test_trace_participants():
    assert trace_participants(()) == frozenset()
    assert trace_participants(parse_trace("p->q:l")) == {"p", "q"}
    assert trace_participants(parse_trace("p->q:l1,r->s:l2")) == {"p", "q", "r", "s"}


def test_parse_trace():
    assert parse_trace("") == ()
    assert parse_trace(" p->q:l , q->r:m") == (Communication("p", "l", "q"), Communication("q", "m", "r"))
    with pytest.raises(ValidationError):
        parse_trace("p-q:l")


def test_communication_projection():
    a = Communication("p", "l", "q")
    assert a.project("p") == Action(OUT, "q", "l")
    assert a.project("q") == Action(IN, "p", "l")
    assert a.project("r") is None
    assert str(a) == "p->q:l"


# -- equality ---------------------------------------------------------------


def test_equality_examples():
    p = PROCS["P"]
    assert process_equal(p, unfold(p))
    assert process_equal(inact(), inact())
    a = send("q", {"l1": inact()})
    b = send("q", {"l2": inact()})
    assert not process_equal(a, b) and a != b


@given(seeds, st.integers(min_value=1, max_value=3))
def test_unfolding_is_equal(seed, times):
    p = random_process(seed)
    u = unfold(p, times)
    assert process_equal(p, u) and process_equal(u, p)
    assert p == u and hash(p) == hash(u)


@given(processes, processes, processes)
@settings(max_examples=60)
def test_process_equal_is_an_equivalence(a, b, c):
    assert process_equal(a, a)
    assert process_equal(a, b) == process_equal(b, a)
    if process_equal(a, b) and process_equal(b, c):
        assert process_equal(a, c)


@given(processes, processes)
def test_canonical_forms_agree_with_coinduction(a, b):
    assert (a == b) == process_equal(a, b)


@given(processes)
def test_branches_of_equal_terms_are_equal(p):
    u = unfold(p, 2)
    for m in p.messages:
        assert p.branch(m) == u.branch(m)


# -- participants ---------------------------------------------------------


@given(seeds)
@settings(max_examples=40)
def test_participants_cover_traces(seed):
    from mpst_es.verify import gen_well_formed

    g = gen_well_formed(seed, 4)
    seen = set()
    for k in (1, 3, 6):
        for t in g_traces(g, k):
            seen |= trace_participants(t)
        assert seen <= g.participants()
    if not g.is_recursive():
        assert seen == g.participants()


# -- networks -------------------------------------------------------------


def test_network_drops_inactive_bindings():
    p = send("q", {"l": inact()})
    q = receive("p", {"l": inact()})
    n = Network({"p": p, "q": q, "r": inact()})
    assert n.participants == ("p", "q")
    assert n["r"].is_inact and "r" not in n
    assert n == Network([("q", q), ("p", p)])
    assert n.update({"p": inact()}) == Network({"q": q})
    with pytest.raises(ValidationError):
        Network([("p", p), ("p", q)])
