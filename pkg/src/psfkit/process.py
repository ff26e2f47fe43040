"""ACP process expressions with canonical, hash-consed construction.

Smart constructors keep every expression in canonical form:

* nested ``+`` and ``||`` are flattened into sorted n-ary nodes with
  duplicate alternatives removed and ``delta`` summands dropped;
* ``.`` is right-nested, ``delta . x`` collapses to ``delta`` and the
  terminated process is absorbed;
* structurally equal expressions are the same Python object, so state
  identity during LTS expansion is pointer identity.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

from .terms import Term, Var, sort_key as term_sort_key, term_text

VISIBLE = "visible"
TAU = "tau"
DELTA = "delta"


class ProcessError(Exception):
    """Ill-formed process expression or unresolved name."""


class Action:
    """A transition label: a named atom with term arguments, tau, or delta."""

    __slots__ = ("kind", "name", "args", "_skey")
    _pool: dict[tuple, "Action"] = {}

    def __new__(cls, kind: str, name: str = "", args: Iterable = ()) -> "Action":
        args = tuple(args)
        if kind in (TAU, DELTA) and (name or args):
            raise ProcessError(f"{kind} carries no name or arguments")
        key = (kind, name, args)
        hit = cls._pool.get(key)
        if hit is None:
            hit = object.__new__(cls)
            object.__setattr__(hit, "kind", kind)
            object.__setattr__(hit, "name", name)
            object.__setattr__(hit, "args", args)
            object.__setattr__(hit, "_skey", None)
            cls._pool[key] = hit
        return hit

    def __setattr__(self, *a):  # pragma: no cover - guard
        raise AttributeError("Action is immutable")

    @property
    def is_tau(self) -> bool:
        return self.kind == TAU

    @property
    def is_delta(self) -> bool:
        return self.kind == DELTA

    def key(self) -> tuple:
        cached = self._skey
        if cached is None:
            cached = (self.kind, self.name, tuple(term_sort_key(a) for a in self.args))
            object.__setattr__(self, "_skey", cached)
        return cached

    def text(self) -> str:
        if self.kind == TAU:
            return "skip"
        if self.kind == DELTA:
            return "delta"
        if not self.args:
            return self.name
        return f"{self.name}({', '.join(term_text(a) for a in self.args)})"

    def __repr__(self) -> str:
        return f"Action({self.text()!r})"


def act(name: str, *args) -> "Act":
    return Act(Action(VISIBLE, name, args))


SKIP_ACTION = Action(TAU)
DELTA_ACTION = Action(DELTA)


class AtomPattern:
    """One element of an atom set: an atom name with optional arg patterns.

    ``args=None`` matches every instance of the atom; otherwise the args
    must match elementwise (variables are wildcards, shared consistently).
    """

    __slots__ = ("name", "args")
    _pool: dict[tuple, "AtomPattern"] = {}

    def __new__(cls, name: str, args=None) -> "AtomPattern":
        if args is not None:
            args = tuple(args)
        key = (name, args)
        hit = cls._pool.get(key)
        if hit is None:
            hit = object.__new__(cls)
            object.__setattr__(hit, "name", name)
            object.__setattr__(hit, "args", args)
            cls._pool[key] = hit
        return hit

    def __setattr__(self, *a):  # pragma: no cover - guard
        raise AttributeError("AtomPattern is immutable")

    def matches(self, action: Action) -> bool:
        if action.kind != VISIBLE or action.name != self.name:
            return False
        if self.args is None:
            return True
        if len(self.args) != len(action.args):
            return False
        from .terms import match

        binding: dict = {}
        for p, s in zip(self.args, action.args):
            if match(p, s, binding) is None:
                return False
        return True

    def key(self) -> tuple:
        if self.args is None:
            return (self.name, -1)
        return (self.name, len(self.args)) + tuple(term_sort_key(a) for a in self.args)

    def text(self) -> str:
        if self.args is None:
            return self.name
        return f"{self.name}({', '.join(term_text(a) for a in self.args)})"

    def __repr__(self) -> str:
        return f"AtomPattern({self.text()!r})"


class SetRef:
    """A by-name reference to a declared atom set (resolved at flatten)."""

    __slots__ = ("name",)
    _pool: dict[str, "SetRef"] = {}

    def __new__(cls, name: str) -> "SetRef":
        hit = cls._pool.get(name)
        if hit is None:
            hit = object.__new__(cls)
            object.__setattr__(hit, "name", name)
            cls._pool[name] = hit
        return hit

    def __setattr__(self, *a):  # pragma: no cover - guard
        raise AttributeError("SetRef is immutable")

    def contains(self, action) -> bool:
        raise ProcessError(f"unresolved atom-set reference {self.name}")

    def key(self) -> tuple:
        return ("setref", self.name)

    def text(self) -> str:
        return self.name

    def __repr__(self) -> str:
        return f"SetRef({self.name!r})"


class AtomSet:
    """An immutable set of atom patterns (encapsulation/hiding/priority)."""

    __slots__ = ("patterns",)
    _pool: dict[tuple, "AtomSet"] = {}

    def __new__(cls, patterns: Iterable[AtomPattern]) -> "AtomSet":
        pats = tuple(sorted(set(patterns), key=lambda p: p.key()))
        hit = cls._pool.get(pats)
        if hit is None:
            hit = object.__new__(cls)
            object.__setattr__(hit, "patterns", pats)
            cls._pool[pats] = hit
        return hit

    def __setattr__(self, *a):  # pragma: no cover - guard
        raise AttributeError("AtomSet is immutable")

    @classmethod
    def of_names(cls, *names: str) -> "AtomSet":
        return cls(AtomPattern(n) for n in names)

    def contains(self, action: Action) -> bool:
        return any(p.matches(action) for p in self.patterns)

    def names(self) -> set[str]:
        return {p.name for p in self.patterns}

    def key(self) -> tuple:
        return tuple(p.key() for p in self.patterns)

    def text(self) -> str:
        return "{" + ", ".join(p.text() for p in self.patterns) + "}"

    def __repr__(self) -> str:
        return f"AtomSet({self.text()})"


# --------------------------------------------------------------------------
# Process expressions


class ProcessExpr:
    """Base class; all variants are interned and immutable."""

    __slots__ = ("_skey",)
    KIND = "?"

    def children(self) -> Sequence["ProcessExpr"]:
        return ()

    def key(self) -> tuple:
        cached = self._skey
        if cached is None:
            cached = self._key()
            object.__setattr__(self, "_skey", cached)
        return cached

    def _key(self) -> tuple:  # pragma: no cover - abstract
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"<{self.KIND} {pexpr_text(self)}>"

    def __setattr__(self, *a):  # pragma: no cover - guard
        raise AttributeError("ProcessExpr is immutable")


_POOL: dict[tuple, ProcessExpr] = {}


def _intern(cls, key: tuple, builder) -> ProcessExpr:
    hit = _POOL.get(key)
    if hit is None:
        hit = builder()
        object.__setattr__(hit, "_skey", None)
        _POOL[key] = hit
    return hit


class Terminated(ProcessExpr):
    """The successful-termination marker (the ACP tick)."""

    __slots__ = ()
    KIND = "term"

    def _key(self):
        return ("term",)


def _mk_terminated() -> Terminated:
    return _intern(Terminated, ("terminated",), lambda: object.__new__(Terminated))


TERMINATED = _mk_terminated()


class Act(ProcessExpr):
    __slots__ = ("action",)
    KIND = "act"

    def __new__(cls, action: Action):
        key = ("act", action)

        def build():
            node = object.__new__(cls)
            object.__setattr__(node, "action", action)
            return node

        return _intern(cls, key, build)

    def _key(self):
        return ("act", self.action.key())


SKIP = Act(SKIP_ACTION)
DELTA_P = Act(DELTA_ACTION)


class Seq(ProcessExpr):
    """Right-nested sequential composition."""

    __slots__ = ("left", "right")
    KIND = "seq"

    def __new__(cls, left: ProcessExpr, right: ProcessExpr):
        key = ("seq", left, right)

        def build():
            node = object.__new__(cls)
            object.__setattr__(node, "left", left)
            object.__setattr__(node, "right", right)
            return node

        return _intern(cls, key, build)

    def children(self):
        return (self.left, self.right)

    def _key(self):
        return ("seq", self.left.key(), self.right.key())


class Alt(ProcessExpr):
    """Sorted n-ary alternative composition."""

    __slots__ = ("alts",)
    KIND = "alt"

    def __new__(cls, alts: tuple):
        key = ("alt",) + alts

        def build():
            node = object.__new__(cls)
            object.__setattr__(node, "alts", alts)
            return node

        return _intern(cls, key, build)

    def children(self):
        return self.alts

    def _key(self):
        return ("alt",) + tuple(a.key() for a in self.alts)


class Par(ProcessExpr):
    """Sorted n-ary parallel composition (free merge + communication)."""

    __slots__ = ("parts",)
    KIND = "par"

    def __new__(cls, parts: tuple):
        key = ("par",) + parts

        def build():
            node = object.__new__(cls)
            object.__setattr__(node, "parts", parts)
            return node

        return _intern(cls, key, build)

    def children(self):
        return self.parts

    def _key(self):
        return ("par",) + tuple(p.key() for p in self.parts)


class Sum(ProcessExpr):
    """``sum(v in S, body)`` — alternative over a finite sort universe."""

    __slots__ = ("var", "sort", "body")
    KIND = "sum"

    def __new__(cls, var: Var, sort: str, body: ProcessExpr):
        key = ("sum", var, sort, body)

        def build():
            node = object.__new__(cls)
            object.__setattr__(node, "var", var)
            object.__setattr__(node, "sort", sort)
            object.__setattr__(node, "body", body)
            return node

        return _intern(cls, key, build)

    def children(self):
        return (self.body,)

    def _key(self):
        return ("sum", self.var.name, self.sort, self.body.key())


class Guard(ProcessExpr):
    """``[lhs = rhs] -> body``: body if both sides rewrite equal, else delta."""

    __slots__ = ("lhs", "rhs", "body")
    KIND = "guard"

    def __new__(cls, lhs, rhs, body: ProcessExpr):
        key = ("guard", lhs, rhs, body)

        def build():
            node = object.__new__(cls)
            object.__setattr__(node, "lhs", lhs)
            object.__setattr__(node, "rhs", rhs)
            object.__setattr__(node, "body", body)
            return node

        return _intern(cls, key, build)

    def children(self):
        return (self.body,)

    def _key(self):
        return ("guard", term_sort_key(self.lhs), term_sort_key(self.rhs), self.body.key())


class Encaps(ProcessExpr):
    __slots__ = ("atoms", "body")
    KIND = "encaps"

    def __new__(cls, atoms: AtomSet, body: ProcessExpr):
        key = ("encaps", atoms, body)

        def build():
            node = object.__new__(cls)
            object.__setattr__(node, "atoms", atoms)
            object.__setattr__(node, "body", body)
            return node

        return _intern(cls, key, build)

    def children(self):
        return (self.body,)

    def _key(self):
        return ("encaps", self.atoms.key(), self.body.key())


class Hide(ProcessExpr):
    __slots__ = ("atoms", "body")
    KIND = "hide"

    def __new__(cls, atoms: AtomSet, body: ProcessExpr):
        key = ("hide", atoms, body)

        def build():
            node = object.__new__(cls)
            object.__setattr__(node, "atoms", atoms)
            object.__setattr__(node, "body", body)
            return node

        return _intern(cls, key, build)

    def children(self):
        return (self.body,)

    def _key(self):
        return ("hide", self.atoms.key(), self.body.key())


class Prio(ProcessExpr):
    """``prio(P > atoms, body)``: P-labeled transitions preempt the rest."""

    __slots__ = ("high", "body")
    KIND = "prio"

    def __new__(cls, high: AtomSet, body: ProcessExpr):
        key = ("prio", high, body)

        def build():
            node = object.__new__(cls)
            object.__setattr__(node, "high", high)
            object.__setattr__(node, "body", body)
            return node

        return _intern(cls, key, build)

    def children(self):
        return (self.body,)

    def _key(self):
        return ("prio", self.high.key(), self.body.key())


class Disrupt(ProcessExpr):
    """``disrupt(x, y)``: y may take over from any state of x."""

    __slots__ = ("body", "interrupter")
    KIND = "disrupt"

    def __new__(cls, body: ProcessExpr, interrupter: ProcessExpr):
        key = ("disrupt", body, interrupter)

        def build():
            node = object.__new__(cls)
            object.__setattr__(node, "body", body)
            object.__setattr__(node, "interrupter", interrupter)
            return node

        return _intern(cls, key, build)

    def children(self):
        return (self.body, self.interrupter)

    def _key(self):
        return ("disrupt", self.body.key(), self.interrupter.key())


class Iter(ProcessExpr):
    """Binary iteration ``x * y`` with law ``x*y = x.(x*y) + y``."""

    __slots__ = ("body", "exit")
    KIND = "iter"

    def __new__(cls, body: ProcessExpr, exit: ProcessExpr):
        key = ("iter", body, exit)

        def build():
            node = object.__new__(cls)
            object.__setattr__(node, "body", body)
            object.__setattr__(node, "exit", exit)
            return node

        return _intern(cls, key, build)

    def children(self):
        return (self.body, self.exit)

    def _key(self):
        return ("iter", self.body.key(), self.exit.key())


class Call(ProcessExpr):
    """Reference to a named process definition (lazy unfold)."""

    __slots__ = ("name", "args")
    KIND = "call"

    def __new__(cls, name: str, args: Iterable = ()):
        args = tuple(args)
        key = ("call", name, args)

        def build():
            node = object.__new__(cls)
            object.__setattr__(node, "name", name)
            object.__setattr__(node, "args", args)
            return node

        return _intern(cls, key, build)

    def _key(self):
        return ("call", self.name, tuple(term_sort_key(a) for a in self.args))


# --------------------------------------------------------------------------
# Canonicalizing combinators


def seq(left: ProcessExpr, right: ProcessExpr) -> ProcessExpr:
    if left is TERMINATED:
        return right
    if right is TERMINATED:
        return left
    if left is DELTA_P:
        return DELTA_P
    if isinstance(left, Seq):
        return seq(left.left, seq(left.right, right))
    return Seq(left, right)


def seq_all(*parts: ProcessExpr) -> ProcessExpr:
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = seq(p, out)
    return out


def alt(*alternatives: ProcessExpr) -> ProcessExpr:
    flat: list[ProcessExpr] = []
    for a in alternatives:
        if isinstance(a, Alt):
            flat.extend(a.alts)
        elif a is DELTA_P:
            continue
        elif a is TERMINATED:
            raise ProcessError("terminated process cannot be an alternative")
        else:
            flat.append(a)
    uniq = sorted(set(flat), key=lambda e: e.key())
    if not uniq:
        return DELTA_P
    if len(uniq) == 1:
        return uniq[0]
    return Alt(tuple(uniq))


def par(*parts: ProcessExpr) -> ProcessExpr:
    flat: list[ProcessExpr] = []
    for p in parts:
        if isinstance(p, Par):
            flat.extend(p.parts)
        elif p is TERMINATED:
            continue
        else:
            flat.append(p)
    if not flat:
        return TERMINATED
    if len(flat) == 1:
        return flat[0]
    return Par(tuple(sorted(flat, key=lambda e: e.key())))


def encaps(atoms: AtomSet, body: ProcessExpr) -> ProcessExpr:
    if body is TERMINATED:
        return TERMINATED
    return Encaps(atoms, body)


def hide(atoms: AtomSet, body: ProcessExpr) -> ProcessExpr:
    if body is TERMINATED:
        return TERMINATED
    return Hide(atoms, body)


def prio(high: AtomSet, body: ProcessExpr) -> ProcessExpr:
    if body is TERMINATED:
        return TERMINATED
    return Prio(high, body)


def disrupt(body: ProcessExpr, interrupter: ProcessExpr) -> ProcessExpr:
    return Disrupt(body, interrupter)


def iteration(body: ProcessExpr, exit: ProcessExpr) -> ProcessExpr:
    return Iter(body, exit)


# --------------------------------------------------------------------------
# Pretty printing (canonical text; parseable by the spec language parser)

_PREC = {"alt": 10, "par": 20, "iter": 30, "seq": 40}


def pexpr_text(p: ProcessExpr, prec: int = 0) -> str:
    def wrap(s: str, mine: int) -> str:
        return f"({s})" if mine < prec else s

    if p is TERMINATED:
        return "tick"
    if isinstance(p, Act):
        return p.action.text()
    if isinstance(p, Seq):
        parts = []
        cur: ProcessExpr = p
        while isinstance(cur, Seq):
            parts.append(pexpr_text(cur.left, _PREC["seq"] + 1))
            cur = cur.right
        parts.append(pexpr_text(cur, _PREC["seq"]))
        return wrap(" . ".join(parts), _PREC["seq"])
    if isinstance(p, Alt):
        s = " + ".join(pexpr_text(a, _PREC["alt"] + 1) for a in p.alts)
        return wrap(s, _PREC["alt"])
    if isinstance(p, Par):
        s = " || ".join(pexpr_text(a, _PREC["par"] + 1) for a in p.parts)
        return wrap(s, _PREC["par"])
    if isinstance(p, Iter):
        s = (
            pexpr_text(p.body, _PREC["iter"] + 1)
            + " * "
            + pexpr_text(p.exit, _PREC["iter"] + 1)
        )
        return wrap(s, _PREC["iter"])
    if isinstance(p, Sum):
        return f"sum({p.var.name} in {p.sort}, {pexpr_text(p.body)})"
    if isinstance(p, Guard):
        return f"[{term_text(p.lhs)} = {term_text(p.rhs)}] -> {pexpr_text(p.body, _PREC['seq'])}"
    if isinstance(p, Encaps):
        return f"encaps({p.atoms.text()}, {pexpr_text(p.body)})"
    if isinstance(p, Hide):
        return f"hide({p.atoms.text()}, {pexpr_text(p.body)})"
    if isinstance(p, Prio):
        return f"prio({p.high.text()} > atoms, {pexpr_text(p.body)})"
    if isinstance(p, Disrupt):
        return f"disrupt({pexpr_text(p.body)}, {pexpr_text(p.interrupter)})"
    if isinstance(p, Call):
        if p.args:
            return f"{p.name}({', '.join(term_text(a) for a in p.args)})"
        return p.name
    raise ProcessError(f"unprintable node {p!r}")


def substitute_expr(p: ProcessExpr, binding: dict) -> ProcessExpr:
    """Substitute data terms for variables throughout a process expression."""
    from .terms import substitute

    if p is TERMINATED:
        return p
    if isinstance(p, Act):
        a = p.action
        if not a.args:
            return p
        return Act(Action(a.kind, a.name, tuple(substitute(x, binding) for x in a.args)))
    if isinstance(p, Seq):
        return seq(substitute_expr(p.left, binding), substitute_expr(p.right, binding))
    if isinstance(p, Alt):
        return alt(*(substitute_expr(a, binding) for a in p.alts))
    if isinstance(p, Par):
        return par(*(substitute_expr(a, binding) for a in p.parts))
    if isinstance(p, Sum):
        inner = {k: v for k, v in binding.items() if k is not p.var}
        return Sum(p.var, p.sort, substitute_expr(p.body, inner))
    if isinstance(p, Guard):
        return Guard(
            substitute(p.lhs, binding),
            substitute(p.rhs, binding),
            substitute_expr(p.body, binding),
        )
    if isinstance(p, Encaps):
        return Encaps(p.atoms, substitute_expr(p.body, binding))
    if isinstance(p, Hide):
        return Hide(p.atoms, substitute_expr(p.body, binding))
    if isinstance(p, Prio):
        return Prio(p.high, substitute_expr(p.body, binding))
    if isinstance(p, Disrupt):
        return Disrupt(
            substitute_expr(p.body, binding), substitute_expr(p.interrupter, binding)
        )
    if isinstance(p, Iter):
        return Iter(substitute_expr(p.body, binding), substitute_expr(p.exit, binding))
    if isinstance(p, Call):
        return Call(p.name, tuple(substitute(a, binding) for a in p.args))
    return p


def transform_expr(
    p: ProcessExpr,
    *,
    on_action=None,
    on_call=None,
    on_set=None,
    on_term=None,
    on_sort=None,
) -> ProcessExpr:
    """Bottom-up structural rewrite of an expression.

    ``on_action(Action) -> ProcessExpr|Action``, ``on_call(Call) -> ProcessExpr``,
    ``on_set(AtomSet|SetRef) -> AtomSet|SetRef``, ``on_term(Term) -> Term``,
    ``on_sort(str) -> str`` (sum binders); any hook may be None (identity).
    ``on_term`` is applied inside action and call arguments and guard sides.
    """

    def t(x):
        return on_term(x) if on_term is not None else x

    def tt(args):
        return tuple(t(a) for a in args)

    def s(aset):
        return on_set(aset) if on_set is not None else aset

    def rec(node: ProcessExpr) -> ProcessExpr:
        if node is TERMINATED:
            return node
        if isinstance(node, Act):
            a = node.action
            if a.args and on_term is not None:
                a = Action(a.kind, a.name, tt(a.args))
            if on_action is not None:
                out = on_action(a)
                if isinstance(out, Action):
                    return Act(out)
                return out
            return Act(a)
        if isinstance(node, Seq):
            return seq(rec(node.left), rec(node.right))
        if isinstance(node, Alt):
            return alt(*(rec(c) for c in node.alts))
        if isinstance(node, Par):
            return par(*(rec(c) for c in node.parts))
        if isinstance(node, Sum):
            sort = on_sort(node.sort) if on_sort is not None else node.sort
            return Sum(node.var, sort, rec(node.body))
        if isinstance(node, Guard):
            return Guard(t(node.lhs), t(node.rhs), rec(node.body))
        if isinstance(node, Encaps):
            return Encaps(s(node.atoms), rec(node.body))
        if isinstance(node, Hide):
            return Hide(s(node.atoms), rec(node.body))
        if isinstance(node, Prio):
            return Prio(s(node.high), rec(node.body))
        if isinstance(node, Disrupt):
            return Disrupt(rec(node.body), rec(node.interrupter))
        if isinstance(node, Iter):
            return Iter(rec(node.body), rec(node.exit))
        if isinstance(node, Call):
            c = Call(node.name, tt(node.args)) if node.args else node
            if on_call is not None:
                return on_call(c)
            return c
        raise ProcessError(f"cannot transform {node!r}")

    return rec(p)
