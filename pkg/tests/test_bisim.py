from __future__ import annotations

import random

from psfkit.bisim import branching_bisim
from psfkit.lts import Lts
from psfkit.process import Action, SKIP, act, alt, iteration, par, seq
from psfkit.semantics import expand_lts

from helpers import A, B, basic_env, random_term
from oracles import branching_bisim_oracle


def _lts(env, p, cap=4000):
    return expand_lts(env, p, cap)


def test_delta_vs_delta():
    env = basic_env()
    from psfkit.process import DELTA_P

    assert branching_bisim(_lts(env, DELTA_P), _lts(env, DELTA_P))


def test_tau_law_equivalence():
    env = basic_env()
    assert branching_bisim(_lts(env, seq(A, seq(SKIP, B))), _lts(env, seq(A, B)))


def test_root_tau_not_absorbed():
    env = basic_env()
    assert not branching_bisim(_lts(env, seq(SKIP, A)), _lts(env, A))


def test_choice_tau_distinguished():
    # a + tau.b is not branching bisimilar to a + b
    env = basic_env()
    p = alt(A, seq(SKIP, B))
    q = alt(A, B)
    assert not branching_bisim(_lts(env, p), _lts(env, q))


def test_commutativity_up_to_bisim():
    rng = random.Random(23)
    env = basic_env()
    for _ in range(30):
        p = random_term(rng, 2)
        q = random_term(rng, 2)
        assert branching_bisim(_lts(env, alt(p, q)), _lts(env, alt(q, p)))
        assert branching_bisim(_lts(env, par(p, q)), _lts(env, par(q, p)))


def _random_lts(rng: random.Random, max_states=6) -> Lts:
    n = rng.randrange(1, max_states + 1)
    labels = ["a", "b", "tau"]
    transitions = []
    for s in range(n):
        for _ in range(rng.randrange(0, 3)):
            lbl = rng.choice(labels)
            dst = rng.randrange(n)
            a = Action("tau") if lbl == "tau" else Action("visible", lbl)
            transitions.append((s, a, dst))
    return Lts(n_states=n, transitions=tuple(set(transitions)))


def _tau_padded_variant(rng: random.Random, lts: Lts) -> Lts:
    """Insert a stuttering tau state on one random transition."""
    if not lts.transitions:
        return lts
    idx = rng.randrange(len(lts.transitions))
    src, a, dst = lts.transitions[idx]
    extra = lts.n_states
    rest = list(lts.transitions[:idx]) + list(lts.transitions[idx + 1 :])
    rest += [(src, a, extra), (extra, Action("tau"), dst)]
    return Lts(
        n_states=lts.n_states + 1,
        transitions=tuple(rest),
        terminating=lts.terminating,
    )


def test_agrees_with_relation_oracle_on_random_pairs():
    rng = random.Random(42)
    checked = 0
    agree_true = 0
    for _ in range(200):
        l1 = _random_lts(rng)
        if rng.random() < 0.5:
            l2 = _tau_padded_variant(rng, l1)
        else:
            l2 = _random_lts(rng)
        got = branching_bisim(l1, l2)
        want = branching_bisim_oracle(l1, l2)
        assert got == want
        checked += 1
        agree_true += got
    assert checked == 200
    # sanity: the sample contains both outcomes
    assert 0 < agree_true < 200
