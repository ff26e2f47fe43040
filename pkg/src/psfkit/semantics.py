"""Structural operational semantics: step relation and LTS expansion.

``step`` returns the exact set of enabled transitions of a process under a
:class:`ProcessEnv`; ``expand_lts`` is its breadth-first closure with
canonical-form state identity.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Optional

from .lts import Lts
from .process import (
    Act,
    Action,
    Alt,
    AtomPattern,
    AtomSet,
    Call,
    Disrupt,
    Encaps,
    Guard,
    Hide,
    Iter,
    Par,
    Prio,
    ProcessError,
    ProcessExpr,
    Seq,
    Sum,
    TAU,
    TERMINATED,
    VISIBLE,
    alt as _alt,  # noqa: F401  (re-export convenience for tests)
    par as _par,
    seq as _seq,
)
from .terms import Equation, Rewriter, Term, Var, match, substitute


class SemanticsError(ProcessError):
    """Unresolved call, unknown atom, or infinite sort during stepping."""


class CommRule:
    """Handshaking rule: two atom patterns communicating into a result."""

    __slots__ = ("left", "right", "result")

    def __init__(self, left: Term, right: Term, result: Term):
        self.left = left
        self.right = right
        self.result = result

    def __repr__(self) -> str:
        from .terms import term_text

        return (
            f"CommRule({term_text(self.left)} | {term_text(self.right)}"
            f" = {term_text(self.result)})"
        )


class CommTable:
    """Symmetric, binary communication function over atom patterns."""

    def __init__(self, rules: Iterable[CommRule] = ()):
        self._by_names: dict[tuple[str, int, str, int], list[CommRule]] = {}
        self.rules: list[CommRule] = []
        for r in rules:
            self.add(r)

    def add(self, rule: CommRule) -> None:
        key = self._key(rule.left, rule.right)
        existing = self._by_names.get(key, [])
        for other in existing:
            if other.result.name != rule.result.name:
                raise SemanticsError(
                    f"communication for pair {key} is not a handshake: "
                    f"{other.result.name} vs {rule.result.name}"
                )
        self.rules.append(rule)
        self._by_names.setdefault(key, []).append(rule)
        rev = self._key(rule.right, rule.left)
        if rev != key:
            self._by_names.setdefault(rev, []).append(
                CommRule(rule.right, rule.left, rule.result)
            )

    @staticmethod
    def _key(a: Term, b: Term) -> tuple[str, int, str, int]:
        return (a.name, len(a.args), b.name, len(b.args))

    def communicate(self, a: Action, b: Action) -> Optional[Action]:
        if a.kind != VISIBLE or b.kind != VISIBLE:
            return None
        key = (a.name, len(a.args), b.name, len(b.args))
        for rule in self._by_names.get(key, ()):
            binding: dict = {}
            ok = True
            for p, s in zip(rule.left.args, a.args):
                if match(p, s, binding) is None:
                    ok = False
                    break
            if ok:
                for p, s in zip(rule.right.args, b.args):
                    if match(p, s, binding) is None:
                        ok = False
                        break
            if ok:
                res = substitute(rule.result, binding)
                return Action(VISIBLE, res.name, res.args)
        return None


class ProcessEnv:
    """Process definitions, communication table, signatures, and universes."""

    def __init__(
        self,
        definitions: Optional[dict[str, tuple[tuple[Var, ...], ProcessExpr]]] = None,
        comm: Optional[CommTable] = None,
        atoms: Optional[dict[tuple[str, int], tuple[str, ...]]] = None,
        universes: Optional[dict[str, tuple[Term, ...]]] = None,
        equations: Iterable[Equation] = (),
    ):
        self.definitions = definitions or {}
        self.comm = comm or CommTable()
        self.atoms = atoms or {}
        self.universes = universes or {}
        self.equations = list(equations)
        self.rewriter = Rewriter(self.equations)
        self._step_cache: dict[ProcessExpr, tuple[tuple[Action, ProcessExpr], ...]] = {}
        self._unfold_cache: dict[Call, ProcessExpr] = {}

    def define(self, name: str, body: ProcessExpr, params: tuple[Var, ...] = ()) -> None:
        self.definitions[name] = (params, body)

    def universe(self, sort: str) -> tuple[Term, ...]:
        try:
            values = self.universes[sort]
        except KeyError:
            raise SemanticsError(f"sort {sort} has no finite enumeration") from None
        if not values:
            raise SemanticsError(f"sort {sort} has an empty enumeration")
        return values

    def unfold(self, call: Call) -> ProcessExpr:
        hit = self._unfold_cache.get(call)
        if hit is not None:
            return hit
        try:
            params, body = self.definitions[call.name]
        except KeyError:
            raise SemanticsError(f"unresolved process name {call.name}") from None
        if len(params) != len(call.args):
            raise SemanticsError(
                f"process {call.name} expects {len(params)} arguments,"
                f" got {len(call.args)}"
            )
        if params:
            from .process import substitute_expr

            body = substitute_expr(body, dict(zip(params, call.args)))
        self._unfold_cache[call] = body
        return body


_MAX_UNFOLD_DEPTH = 2000


def step(env: ProcessEnv, p: ProcessExpr) -> tuple[tuple[Action, ProcessExpr], ...]:
    """All enabled transitions of ``p``: ``((action, successor), ...)``.

    Successor ``TERMINATED`` encodes the tick.  Results are cached per
    canonical (sub)expression; order is deterministic.
    """
    return _step(env, p, 0)


def _step(env: ProcessEnv, p: ProcessExpr, depth: int) -> tuple[tuple[Action, ProcessExpr], ...]:
    cached = env._step_cache.get(p)
    if cached is not None:
        return cached
    if depth > _MAX_UNFOLD_DEPTH:
        raise SemanticsError(
            "process unfolding exceeded depth budget (unguarded recursion?)"
        )
    out = _step_raw(env, p, depth)
    result = tuple(sorted(set(out), key=lambda t: (t[0].key(), t[1].key())))
    env._step_cache[p] = result
    return result


def _step_raw(env: ProcessEnv, p: ProcessExpr, depth: int) -> list[tuple[Action, ProcessExpr]]:
    if p is TERMINATED:
        return []
    if isinstance(p, Act):
        a = p.action
        if a.is_delta:
            return []
        return [(a, TERMINATED)]
    if isinstance(p, Seq):
        out = []
        for a, nxt in _step(env, p.left, depth + 1):
            out.append((a, _seq(nxt, p.right)))
        return out
    if isinstance(p, Alt):
        out = []
        for child in p.alts:
            out.extend(_step(env, child, depth + 1))
        return out
    if isinstance(p, Par):
        return _step_par(env, p.parts, depth)
    if isinstance(p, Sum):
        out: list[tuple[Action, ProcessExpr]] = []
        from .process import substitute_expr

        for value in env.universe(p.sort):
            body = substitute_expr(p.body, {p.var: value})
            out.extend(_step(env, body, depth + 1))
        return out
    if isinstance(p, Guard):
        lhs = env.rewriter.normalize(p.lhs)
        rhs = env.rewriter.normalize(p.rhs)
        if lhs is rhs:
            return _step(env, p.body, depth + 1)
        return []
    if isinstance(p, Encaps):
        out = []
        for a, nxt in _step(env, p.body, depth + 1):
            if a.kind == VISIBLE and p.atoms.contains(a):
                continue
            out.append((a, _encaps_next(p.atoms, nxt)))
        return out
    if isinstance(p, Hide):
        out = []
        for a, nxt in _step(env, p.body, depth + 1):
            label = Action(TAU) if a.kind == VISIBLE and p.atoms.contains(a) else a
            out.append((label, _hide_next(p.atoms, nxt)))
        return out
    if isinstance(p, Prio):
        ts = _step(env, p.body, depth + 1)
        if any(a.kind == VISIBLE and p.high.contains(a) for a, _ in ts):
            ts = [t for t in ts if t[0].kind == VISIBLE and p.high.contains(t[0])]
        return [(a, _prio_next(p.high, nxt)) for a, nxt in ts]
    if isinstance(p, Disrupt):
        out = []
        for a, nxt in _step(env, p.body, depth + 1):
            if nxt is TERMINATED:
                out.append((a, TERMINATED))
            else:
                out.append((a, Disrupt(nxt, p.interrupter)))
        out.extend(_step(env, p.interrupter, depth + 1))
        return out
    if isinstance(p, Iter):
        out = []
        for a, nxt in _step(env, p.body, depth + 1):
            out.append((a, _seq(nxt, p)))
        out.extend(_step(env, p.exit, depth + 1))
        return out
    if isinstance(p, Call):
        return _step(env, env.unfold(p), depth + 1)
    raise SemanticsError(f"cannot step {p!r}")


def _encaps_next(atoms: AtomSet, nxt: ProcessExpr) -> ProcessExpr:
    return TERMINATED if nxt is TERMINATED else Encaps(atoms, nxt)


def _hide_next(atoms: AtomSet, nxt: ProcessExpr) -> ProcessExpr:
    return TERMINATED if nxt is TERMINATED else Hide(atoms, nxt)


def _prio_next(high: AtomSet, nxt: ProcessExpr) -> ProcessExpr:
    return TERMINATED if nxt is TERMINATED else Prio(high, nxt)


def _step_par(
    env: ProcessEnv, parts: tuple[ProcessExpr, ...], depth: int
) -> list[tuple[Action, ProcessExpr]]:
    """Binary ACP merge folded over the (sorted) component list.

    Treating ``p1 || p2 || ... || pn`` as ``p1 || (p2 || ... || pn)`` keeps
    associativity exact; results are re-canonicalized so commuted states
    coincide.
    """
    if len(parts) == 1:
        return list(_step(env, parts[0], depth + 1))
    head, tail = parts[0], parts[1:]
    tail_expr = _par(*tail)
    left = _step(env, head, depth + 1)
    right = _step(env, tail_expr, depth + 1)
    out: list[tuple[Action, ProcessExpr]] = []
    for a, nxt in left:
        out.append((a, _par(nxt, tail_expr)))
    for a, nxt in right:
        out.append((a, _par(head, nxt)))
    for a, na in left:
        for b, nb in right:
            c = env.comm.communicate(a, b)
            if c is not None:
                out.append((c, _par(na, nb)))
    return out


def expand_lts(env: ProcessEnv, p: ProcessExpr, max_states: int = 100_000) -> Lts:
    """Breadth-first reachable LTS of ``p``; state 0 is the root.

    ``truncated`` is set iff the state cap was hit before closure.
    """
    if max_states < 1:
        raise ValueError("max_states must be >= 1")
    root = p
    index: dict[ProcessExpr, int] = {root: 0}
    states: list[ProcessExpr] = [root]
    transitions: list[tuple[int, Action, int]] = []
    queue = deque([root])
    truncated = False
    while queue:
        src = queue.popleft()
        src_i = index[src]
        for a, nxt in step(env, src):
            dst_i = index.get(nxt)
            if dst_i is None:
                if len(states) >= max_states:
                    truncated = True
                    continue
                dst_i = len(states)
                index[nxt] = dst_i
                states.append(nxt)
                queue.append(nxt)
            transitions.append((src_i, a, dst_i))
    terminating = frozenset(
        {index[TERMINATED]} if TERMINATED in index else ()
    )
    return Lts(
        n_states=len(states),
        transitions=tuple(transitions),
        terminating=terminating,
        truncated=truncated,
        state_exprs=tuple(states),
    )


def make_universes(
    functions: dict[tuple[str, int], tuple[tuple[str, ...], str]],
    equations: Iterable[Equation],
    sorts: Iterable[str],
    cap: int = 4096,
) -> dict[str, tuple[Term, ...]]:
    """Finite sort universes: ground constructor terms to a capped fixpoint.

    Constructors are the functions that never head an equation left-hand
    side; everything else is a defined function and contributes no carrier
    elements.
    """
    defined = {eq.lhs.name for eq in equations}
    ctors = {
        (name, arity): sig
        for (name, arity), sig in functions.items()
        if name not in defined
    }
    universe: dict[str, list[Term]] = {s: [] for s in sorts}
    seen: set[Term] = set()
    changed = True
    while changed:
        changed = False
        for (name, arity), (arg_sorts, res) in sorted(ctors.items()):
            if res not in universe:
                continue
            if arity == 0:
                candidates = [Term(name)]
            else:
                pools = []
                ok = True
                for s in arg_sorts:
                    vals = universe.get(s, [])
                    if not vals:
                        ok = False
                        break
                    pools.append(vals)
                if not ok:
                    continue
                candidates = [Term(name, combo) for combo in _product(pools)]
            for t in candidates:
                if t not in seen:
                    seen.add(t)
                    universe[res].append(t)
                    changed = True
                    if len(universe[res]) > cap:
                        raise SemanticsError(
                            f"sort {res} exceeds the universe cap ({cap}); "
                            "declare a finite enumeration"
                        )
    from .terms import sort_key as _tkey

    return {s: tuple(sorted(vals, key=_tkey)) for s, vals in universe.items()}


def _product(pools: list[list[Term]]):
    if not pools:
        yield ()
        return
    head, rest = pools[0], pools[1:]
    for h in head:
        for tail in _product(rest):
            yield (h,) + tail
