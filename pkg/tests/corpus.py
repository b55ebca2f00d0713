"""Example terms shared by the test modules."""

from __future__ import annotations

from mpst_es.surface import parse_file

SOURCE = """
// four-party relay
network Chain = p :: q!l1 | q :: p?l1; r!l2 | r :: q?l2; s!l3 | s :: r?l3
global Chain = p->q:l1; q->r:l2; r->s:l3

// three-party cyclic wait
network Ring = p :: r?l; q!lp | q :: p?lp; r!lpp | r :: q?lpp; p!l

// a receive that no one can match first
network Stuck = p :: r?l; q?lp | q :: p!lp

// streaming until lp
process P = +{q!l; P, q!lp}
process Q = &{p?l; Q, p?lp}
network Stream = p :: P | q :: Q
global Stream = p->q:{l. Stream, lp. end}

// the stream followed by a hand-over to r and s
process P2 = +{q!l; P2, q!lp; r!l}
network Wake = p :: P2 | q :: Q | r :: p?l; s!lp | s :: r?lp
global Wake = p->q:{l. Wake, lp. p->r:l; r->s:lp}

// p's choice is reported to s by both q and r
network Fork = p :: +{q!l1; r!l, q!l2; r!l} | q :: &{p?l1; s!lp, p?l2; s!lp}
             | r :: p?l; s!lpp | s :: q?lp; r?lpp
global Fork = p->q:{l1. p->r:l; q->s:lp; r->s:lpp, l2. p->r:l; q->s:lp; r->s:lpp}

// independent prefixes in two orders
global Left = p->q:l1; r->s:l2; r->p:l3
global Right = r->s:l2; p->q:l1; r->p:l3

// recursion on one branch, exit through r on the other
global Loop = p->q:{l1. q->r:l3, l2. Loop}
global Pre = q->r:l; Loop

// r appears on one branch only
global Lopsided = p->q:{l1. q->r:l, l2. end}
"""

DEFS = parse_file(SOURCE)
NETS = DEFS.networks
GLOBALS = DEFS.globals
PROCS = DEFS.processes
