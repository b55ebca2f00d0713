from __future__ import annotations

import pytest
from hypothesis import given, settings

from mpst_es.errors import Undefined
from mpst_es.surface import parse_file, parse_global, parse_network, parse_process
from mpst_es.syntax import Network, end, inact
from mpst_es.typesys import (
    INFINITE,
    bounded,
    depth,
    proc_leq,
    project,
    projectable,
    typecheck,
    typing_failure,
    well_formed,
    well_formed_reason,
)
from mpst_es.verify import check_depth_decrease, gen_typed_pair, gen_well_formed

from corpus import GLOBALS, NETS
from strategies import processes, seeds, unfold


def test_depth_examples():
    pre, loop = GLOBALS["Pre"], GLOBALS["Loop"]
    assert [depth(pre, p) for p in "pqr"] == [2, 1, 1]
    assert depth(loop, "r") == INFINITE
    assert [depth(loop, p) for p in "pq"] == [1, 1]
    assert depth(end(), "p") == 0
    assert depth(GLOBALS["Chain"], "s") == 3


def test_boundedness():
    assert not bounded(GLOBALS["Wake"])
    assert "r, s" in well_formed_reason(GLOBALS["Wake"])
    assert bounded(end()) and well_formed(end())
    assert bounded(GLOBALS["Stream"]) and bounded(GLOBALS["Fork"])
    # the exit-through-r loop has infinite depth for r
    assert not bounded(GLOBALS["Loop"]) and not well_formed(GLOBALS["Loop"])


def test_projections_of_the_exit_loop():
    d = parse_file("""
    process Lp = +{q!l1; 0, q!l2; Lp}
    process Lq = &{p?l1; r!l3; 0, p?l2; Lq}
    """)
    g = GLOBALS["Loop"]
    assert project(g, "p") == d.processes["Lp"]
    assert project(g, "q") == d.processes["Lq"]
    assert project(g, "r") == parse_process("q?l3")


def test_projection_edge_cases():
    assert project(GLOBALS["Chain"], "t") == inact()
    with pytest.raises(Undefined):
        project(GLOBALS["Lopsided"], "r")
    assert projectable(GLOBALS["Lopsided"], "p")
    # the looping branch agrees with the exit branch coinductively
    g = parse_global("G", "global G = p->q:{a. G, b. q->r:x}")
    assert project(g, "r") == parse_process("q?x")
    assert not bounded(g)


def test_projection_fails_when_r_skips_first_branch():
    g = parse_global("p->q:{a. end, b. q->r:x}")
    with pytest.raises(Undefined):
        project(g, "r")


def test_proc_leq_examples():
    wide = parse_process("&{p?l1; 0, p?l2; 0}")
    assert proc_leq(wide, parse_process("p?l1"))
    assert not proc_leq(parse_process("p?l1"), wide)
    assert not proc_leq(parse_process("q!l1"), parse_process("+{q!l1; 0, q!l2; 0}"))
    assert not proc_leq(parse_process("+{q!l1; 0, q!l2; 0}"), parse_process("q!l1"))


@given(processes)
def test_proc_leq_reflexive(p):
    assert proc_leq(p, p) and proc_leq(p, unfold(p, 2))


@given(processes, processes, processes)
@settings(max_examples=80)
def test_proc_leq_transitive(a, b, c):
    if proc_leq(a, b) and proc_leq(b, c):
        assert proc_leq(a, c)


def test_typecheck_examples():
    assert typecheck(NETS["Stream"], GLOBALS["Stream"])
    assert typecheck(NETS["Chain"], GLOBALS["Chain"])
    assert typecheck(NETS["Fork"], GLOBALS["Fork"])
    assert typecheck(Network(), end())
    assert not typecheck(NETS["Wake"], GLOBALS["Wake"])


def test_typecheck_reasons():
    assert "no process" in typing_failure(Network(), GLOBALS["Chain"])
    extra = parse_network("p :: q!l1 | q :: p?l1; r!l2 | r :: q?l2; s!l3 | s :: r?l3 | t :: p!x")
    assert "not below" in typing_failure(extra, GLOBALS["Chain"])


def test_wider_inputs_are_typed():
    n = parse_file("""
    process P = +{q!l; P, q!lp}
    process Q = &{p?l; Q, p?lp; 0, p?x; 0}
    network N = p :: P | q :: Q
    """).networks["N"]
    assert typecheck(n, GLOBALS["Stream"])
    narrower = parse_file("""
    process P = +{q!l; P, q!lp}
    process Q = &{p?l; Q}
    network N = p :: P | q :: Q
    """).networks["N"]
    assert not typecheck(narrower, GLOBALS["Stream"])


def test_ring_has_no_type():
    ring = NETS["Ring"]
    for seed in range(60):
        g = gen_well_formed(seed, 4, participants=("p", "q", "r"))
        assert not typecheck(ring, g)


@given(seeds)
@settings(max_examples=60, deadline=None)
def test_generated_pairs_typecheck(seed):
    n, g = gen_typed_pair(seed, 4)
    assert well_formed(g)
    assert typecheck(n, g)


@given(seeds)
@settings(max_examples=60, deadline=None)
def test_depth_decreases_below_choices(seed):
    assert check_depth_decrease(gen_well_formed(seed, 5)).ok
