"""Shared builders for semantics-level tests: tiny envs and random terms."""

from __future__ import annotations

import random

from psfkit.process import (
    Act,
    Action,
    AtomPattern,
    AtomSet,
    ProcessExpr,
    act,
    alt,
    disrupt,
    encaps,
    hide,
    iteration,
    par,
    prio,
    seq,
)
from psfkit.semantics import CommRule, CommTable, ProcessEnv
from psfkit.terms import Term, Var


def basic_env(**defs) -> ProcessEnv:
    """Env with atoms a/b/c/d (c = a|b) and no data."""
    comm = CommTable(
        [CommRule(Term("snd", (Var("x", "D"),)), Term("rec", (Var("x", "D"),)), Term("comm", (Var("x", "D"),)))]
    )
    comm.add(CommRule(Term("a"), Term("b"), Term("c")))
    env = ProcessEnv(comm=comm, universes={"D": (Term("d1"), Term("d2"))})
    for name, body in defs.items():
        env.define(name, body)
    return env


A = act("a")
B = act("b")
C = act("c")
D = act("d")


def random_term(
    rng: random.Random,
    depth: int = 3,
    atoms=("a", "b", "d"),
    laws_safe: bool = False,
) -> ProcessExpr:
    """Small random process over visible atoms plus occasional skip/iter.

    With ``laws_safe`` the term avoids disrupt (and prio), whose states
    observe trailing silent steps — tau laws are not congruences there.
    """
    if depth == 0:
        return act(rng.choice(atoms))
    pick = rng.randrange(7 if laws_safe else 8)
    if pick == 0:
        return act(rng.choice(atoms))
    if pick == 1:
        from psfkit.process import SKIP

        return SKIP
    if pick == 2:
        return seq(
            random_term(rng, depth - 1, atoms, laws_safe),
            random_term(rng, depth - 1, atoms, laws_safe),
        )
    if pick == 3:
        return alt(
            random_term(rng, depth - 1, atoms, laws_safe),
            random_term(rng, depth - 1, atoms, laws_safe),
        )
    if pick == 4:
        return par(
            random_term(rng, depth - 1, atoms, laws_safe),
            random_term(rng, depth - 1, atoms, laws_safe),
        )
    if pick == 5:
        return iteration(
            random_term(rng, depth - 1, atoms, laws_safe),
            random_term(rng, depth - 1, atoms, laws_safe),
        )
    if pick == 6:
        return seq(act(rng.choice(atoms)), random_term(rng, depth - 1, atoms, laws_safe))
    return disrupt(
        random_term(rng, depth - 1, atoms), random_term(rng, depth - 1, atoms)
    )
