"""First-order data terms, signatures, and innermost rewriting.

Terms are hash-consed: structurally equal terms are the same object, so
equality and hashing are identity-based and cheap.  All construction must
go through ``Term``/``Var`` (their ``__new__`` interns).
"""

from __future__ import annotations

from typing import Iterable, Iterator, Optional


class TermError(Exception):
    """Malformed term, signature violation, or rewrite failure."""


class Var:
    """A sorted variable, used in equation/communication patterns."""

    __slots__ = ("name", "sort")
    _pool: dict[tuple[str, str], "Var"] = {}

    def __new__(cls, name: str, sort: str = "") -> "Var":
        key = (name, sort)
        hit = cls._pool.get(key)
        if hit is None:
            hit = object.__new__(cls)
            object.__setattr__(hit, "name", name)
            object.__setattr__(hit, "sort", sort)
            cls._pool[key] = hit
        return hit

    def __setattr__(self, *a):  # pragma: no cover - guard
        raise AttributeError("Var is immutable")

    def __repr__(self) -> str:
        return f"Var({self.name!r}, {self.sort!r})"

    def __str__(self) -> str:
        return self.name


class Term:
    """An application ``name(args...)``; zero-adic constants have no args.

    ``sort`` is optional annotation (the signature is authoritative).
    """

    __slots__ = ("name", "args", "sort", "_skey")
    _pool: dict[tuple, "Term"] = {}

    def __new__(cls, name: str, args: Iterable = (), sort: str = "") -> "Term":
        args = tuple(args)
        key = (name, args, sort)
        hit = cls._pool.get(key)
        if hit is None:
            for a in args:
                if not isinstance(a, (Term, Var)):
                    raise TermError(f"bad argument {a!r} in term {name}")
            hit = object.__new__(cls)
            object.__setattr__(hit, "name", name)
            object.__setattr__(hit, "args", args)
            object.__setattr__(hit, "sort", sort)
            object.__setattr__(hit, "_skey", None)
            cls._pool[key] = hit
        return hit

    def __setattr__(self, *a):  # pragma: no cover - guard
        raise AttributeError("Term is immutable")

    def __repr__(self) -> str:
        return f"Term({term_text(self)!r})"

    def __str__(self) -> str:
        return term_text(self)


def term_text(t) -> str:
    """Canonical text of a term or variable: ``f(a, b)`` / ``c`` / ``x``."""
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return t.name
    return f"{t.name}({', '.join(term_text(a) for a in t.args)})"


def sort_key(t) -> tuple:
    """Total structural order key over terms and variables."""
    if isinstance(t, Var):
        return (0, t.name, t.sort)
    cached = t._skey
    if cached is None:
        cached = (1, t.name, len(t.args)) + tuple(sort_key(a) for a in t.args)
        object.__setattr__(t, "_skey", cached)
    return cached


def term_vars(t) -> set[Var]:
    out: set[Var] = set()
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, Var):
            out.add(x)
        else:
            stack.extend(x.args)
    return out


def is_ground(t) -> bool:
    if isinstance(t, Var):
        return False
    return all(is_ground(a) for a in t.args)


def substitute(t, binding: dict):
    """Replace variables by their bound terms (missing vars stay)."""
    if isinstance(t, Var):
        return binding.get(t, t)
    if not t.args:
        return t
    return Term(t.name, tuple(substitute(a, binding) for a in t.args), t.sort)


def match(pattern, subject, binding: Optional[dict] = None) -> Optional[dict]:
    """Match ``subject`` against ``pattern``; returns the binding or None.

    Non-left-linear patterns are allowed: a repeated variable must match
    identical subterms (the paper's ``equal(tb1, tb1)`` relies on this).
    """
    if binding is None:
        binding = {}
    if isinstance(pattern, Var):
        bound = binding.get(pattern)
        if bound is None:
            binding[pattern] = subject
            return binding
        return binding if bound is subject else None
    if isinstance(subject, Var):
        return None
    if pattern.name != subject.name or len(pattern.args) != len(subject.args):
        return None
    for p, s in zip(pattern.args, subject.args):
        if match(p, s, binding) is None:
            return None
    return binding


class Equation:
    """A directed rewrite rule ``lhs = rhs``; rhs vars must occur in lhs."""

    __slots__ = ("lhs", "rhs", "tag")

    def __init__(self, lhs: Term, rhs, tag: str = ""):
        if isinstance(lhs, Var):
            raise TermError("equation left-hand side cannot be a variable")
        extra = term_vars(rhs) - term_vars(lhs)
        if extra:
            names = ", ".join(sorted(v.name for v in extra))
            raise TermError(f"equation rhs has unbound variables: {names}")
        self.lhs = lhs
        self.rhs = rhs
        self.tag = tag

    def __repr__(self) -> str:
        return f"Equation({term_text(self.lhs)} = {term_text(self.rhs)})"


class Rewriter:
    """Innermost-leftmost rewriting to normal form.

    Rules are tried in declaration order at each redex (the paper's two
    ``equal`` equations are only confluent under that discipline).  A step
    budget guards against non-terminating systems.
    """

    def __init__(self, equations: Iterable[Equation], budget: int = 100_000):
        self.equations = list(equations)
        self.budget = budget
        self._by_head: dict[str, list[Equation]] = {}
        for eq in self.equations:
            self._by_head.setdefault(eq.lhs.name, []).append(eq)
        self._memo: dict[Term, Term] = {}

    def normalize(self, t: Term) -> Term:
        if isinstance(t, Var):
            return t
        steps = [0]
        trace: list[Term] = []
        out = self._norm(t, steps, trace)
        return out

    def _norm(self, t: Term, steps: list[int], trace: list[Term]) -> Term:
        hit = self._memo.get(t)
        if hit is not None:
            return hit
        cur = t
        while True:
            if cur.args:
                new_args = tuple(
                    a if isinstance(a, Var) else self._norm(a, steps, trace)
                    for a in cur.args
                )
                if new_args != cur.args:
                    cur = Term(cur.name, new_args, cur.sort)
            nxt = self._step_at_root(cur)
            if nxt is None:
                self._memo[t] = cur
                return cur
            steps[0] += 1
            trace.append(nxt)
            if steps[0] > self.budget:
                tail = " -> ".join(term_text(x) for x in trace[-5:])
                raise TermError(
                    f"rewrite budget exceeded ({self.budget} steps); tail: {tail}"
                )
            cur = nxt

    def _step_at_root(self, t: Term) -> Optional[Term]:
        for eq in self._by_head.get(t.name, ()):
            b = match(eq.lhs, t)
            if b is not None:
                return substitute(eq.rhs, b)
        return None


def rewrite_term(equations: Iterable[Equation], t: Term, budget: int = 100_000) -> Term:
    """One-shot convenience wrapper around :class:`Rewriter`."""
    return Rewriter(equations, budget=budget).normalize(t)
