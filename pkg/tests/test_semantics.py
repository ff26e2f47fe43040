from __future__ import annotations

import random

import pytest

from psfkit.lts import deadlock_states, LtsError, to_aut, to_dot
from psfkit.process import (
    AtomSet,
    Call,
    DELTA_P,
    Guard,
    SKIP,
    Sum,
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
from psfkit.semantics import SemanticsError, expand_lts, step
from psfkit.terms import Equation, Term, Var

from helpers import A, B, C, D, basic_env, random_term


def test_act_steps_to_termination():
    env = basic_env()
    ((a, nxt),) = step(env, A)
    assert a.name == "a" and nxt.KIND == "term"


def test_delta_has_no_transitions():
    env = basic_env()
    assert step(env, DELTA_P) == ()


def test_encapsulated_unmatched_send_deadlocks():
    env = basic_env()
    p = encaps(AtomSet.of_names("snd", "rec"), act("snd", Term("d1")))
    assert step(env, p) == ()


def test_parallel_handshake_produces_comm():
    env = basic_env()
    p = par(act("snd", Term("d1")), act("rec", Term("d1")))
    labels = {a.text() for a, _ in step(env, p)}
    assert "comm(d1)" in labels
    # the communication successor terminates both sides
    succ = [nxt for a, nxt in step(env, p) if a.name == "comm"]
    assert succ and all(s.KIND == "term" for s in succ)


def test_no_three_way_synchronization():
    env = basic_env()
    p = par(act("snd", Term("d1")), act("rec", Term("d1")), act("rec", Term("d1")))
    for a, _ in step(env, p):
        assert a.name in ("snd", "rec", "comm")
    comm_succs = [nxt for a, nxt in step(env, p) if a.name == "comm"]
    # comm result must leave the third component untouched
    assert all(nxt.KIND == "act" for nxt in comm_succs)


def test_seq_termination_bookkeeping():
    env = basic_env()
    p = seq(A, B)
    ((a, mid),) = step(env, p)
    assert a.name == "a"
    ((b, end),) = step(env, mid)
    assert b.name == "b" and end.KIND == "term"


def test_sum_expands_over_universe():
    env = basic_env()
    v = Var("x", "D")
    p = Sum(v, "D", act("snd", v))
    labels = {a.text() for a, _ in step(env, p)}
    assert labels == {"snd(d1)", "snd(d2)"}


def test_sum_over_unknown_sort_errors():
    env = basic_env()
    v = Var("x", "Nope")
    with pytest.raises(SemanticsError, match="Nope"):
        step(env, Sum(v, "Nope", act("snd", v)))


def test_unresolved_call_errors():
    env = basic_env()
    with pytest.raises(SemanticsError, match="NoSuch"):
        step(env, Call("NoSuch"))


def test_guard_resolves_via_rewriting():
    x = Var("tb1", "T")
    env = basic_env()
    env.equations.append(Equation(Term("equal", (x, x)), Term("true")))
    from psfkit.terms import Rewriter

    env.rewriter = Rewriter(env.equations)
    good = Guard(Term("equal", (Term("k"), Term("k"))), Term("true"), A)
    bad = Guard(Term("equal", (Term("k"), Term("j"))), Term("true"), A)
    assert {a.text() for a, _ in step(env, good)} == {"a"}
    assert step(env, bad) == ()


def test_hide_relabels_to_tau_preserving_count():
    env = basic_env()
    p = alt(seq(A, B), D)
    hidden = hide(AtomSet.of_names("a"), p)
    plain = step(env, p)
    masked = step(env, hidden)
    assert len(plain) == len(masked)
    assert {a.text() for a, _ in masked} == {"skip", "d"}


def test_priority_drops_low_actions():
    env = basic_env()
    p = prio(AtomSet.of_names("a"), alt(A, B))
    assert {a.text() for a, _ in step(env, p)} == {"a"}
    # two high-priority actions compete: both stay enabled
    p2 = prio(AtomSet.of_names("a", "b"), alt(A, B))
    assert {a.text() for a, _ in step(env, p2)} == {"a", "b"}


def test_disrupt_offers_interrupter_everywhere():
    env = basic_env()
    p = disrupt(seq(A, B), D)
    labels = {a.text() for a, _ in step(env, p)}
    assert labels == {"a", "d"}
    mid = [nxt for a, nxt in step(env, p) if a.name == "a"][0]
    assert {a.text() for a, _ in step(env, mid)} == {"b", "d"}


def test_iteration_unfolds_like_its_law():
    env = basic_env()
    loop = iteration(A, B)
    unrolled = alt(seq(A, loop), B)
    l1 = expand_lts(env, loop, 100)
    l2 = expand_lts(env, unrolled, 100)
    from psfkit.bisim import branching_bisim

    assert branching_bisim(l1, l2)


def test_expand_counts_simple_chain():
    env = basic_env()
    lts = expand_lts(env, seq(A, B), 100)
    assert lts.n_states == 3 and len(lts.transitions) == 2 and not lts.truncated


def test_expand_cap_marks_truncated():
    env = basic_env()
    lts = expand_lts(env, seq(A, B), 1)
    assert lts.truncated


def test_deadlock_detection():
    env = basic_env()
    assert deadlock_states(expand_lts(env, DELTA_P, 10)) == {0}
    blocked = encaps(AtomSet.of_names("snd", "rec"), seq(act("snd", Term("d1")), A))
    assert deadlock_states(expand_lts(env, blocked, 10)) == {0}
    ok = expand_lts(env, A, 10)
    assert deadlock_states(ok) == set()
    with pytest.raises(LtsError):
        deadlock_states(expand_lts(env, seq(A, B), 1))


def test_encapsulation_soundness_random():
    rng = random.Random(7)
    env = basic_env()
    for _ in range(50):
        p = random_term(rng)
        lts = expand_lts(env, encaps(AtomSet.of_names("a"), p), 2000)
        assert all(a.name != "a" for _s, a, _d in lts.transitions)


def test_exports_render_tau():
    env = basic_env()
    lts = expand_lts(env, seq(SKIP, A), 10)
    dot = to_dot(lts)
    aut = to_aut(lts)
    assert '"tau"' in aut and 'label="tau"' in dot
    assert aut.startswith("des (0, 2, 3)")
