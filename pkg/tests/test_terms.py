from __future__ import annotations

import random

import pytest

from psfkit.terms import Equation, Rewriter, Term, TermError, Var, match, rewrite_term


def _demo_equations():
    t = Var("t", "Tterm")
    tb1 = Var("tb1", "TBterm")
    tb2 = Var("tb2", "TBterm")
    return [
        Equation(Term("tterm", (Term("tbterm", (t,)),)), t),
        Equation(Term("not", (Term("true"),)), Term("false")),
        Equation(Term("not", (Term("false"),)), Term("true")),
        Equation(Term("equal", (tb1, tb1)), Term("true")),
        Equation(Term("not", (Term("equal", (tb1, tb2)),)), Term("true")),
    ]


def test_terms_are_interned():
    a = Term("f", (Term("c"),))
    b = Term("f", (Term("c"),))
    assert a is b
    assert Var("x", "S") is Var("x", "S")


def test_unwrap_roundtrip():
    eqs = _demo_equations()
    msg = Term("message")
    assert rewrite_term(eqs, Term("tterm", (Term("tbterm", (msg,)),))) is msg


def test_equal_reflexive_rule():
    eqs = _demo_equations()
    t1 = Term("t1")
    assert rewrite_term(eqs, Term("equal", (t1, t1))) is Term("true")


def test_not_equal_default_case():
    eqs = _demo_equations()
    t1, t2 = Term("t1"), Term("t2")
    out = rewrite_term(eqs, Term("not", (Term("equal", (t1, t2)),)))
    assert out is Term("true")
    # the reflexive case must go through the boolean table instead
    same = rewrite_term(eqs, Term("not", (Term("equal", (t1, t1)),)))
    assert same is Term("false")


def test_randomized_wrap_towers():
    eqs = _demo_equations()
    rng = random.Random(11)
    base = [Term("message"), Term("ack"), Term("quit")]
    for _ in range(100):
        t = rng.choice(base)
        wrapped = t
        for _ in range(rng.randrange(1, 6)):
            wrapped = Term("tterm", (Term("tbterm", (wrapped,)),))
        assert rewrite_term(eqs, wrapped) is t


def test_rhs_variable_must_occur_in_lhs():
    x, y = Var("x", "S"), Var("y", "S")
    with pytest.raises(TermError):
        Equation(Term("f", (x,)), y)


def test_nonterminating_system_reports_budget():
    x = Var("x", "S")
    eqs = [Equation(Term("f", (x,)), Term("f", (Term("f", (x,)),)))]
    with pytest.raises(TermError, match="budget"):
        rewrite_term(eqs, Term("f", (Term("c"),)), budget=50)


def test_nonlinear_match():
    x = Var("x", "S")
    pat = Term("p", (x, x))
    assert match(pat, Term("p", (Term("a"), Term("a")))) == {x: Term("a")}
    assert match(pat, Term("p", (Term("a"), Term("b")))) is None
