"""Scripted algebraic rewriting: tau laws, iteration unfolding, definitions.

Rewriting is syntactic modulo the canonical form and driven by explicit
rule lists; there is no normalizing search, because the derivations the
laws replay apply them in both directions.

Laws (``x``, ``y``, ``z`` arbitrary, tau is the silent step):

* ``tau1``: ``x . tau . y = x . y`` (also the trailing form ``x . tau = x``)
* ``tau2``: ``x . (y + tau . z) = x . (y + tau . z) + x . z``
* ``iter``: ``x * y = x . (x * y) + y``
* ``defs``: unfold (forward) or fold (reverse) a named definition
"""

from __future__ import annotations

from typing import Iterable, Optional

from .process import (
    Act,
    Alt,
    Call,
    Disrupt,
    Encaps,
    Guard,
    Hide,
    Iter,
    Par,
    Prio,
    ProcessExpr,
    Seq,
    SKIP,
    Sum,
    alt,
    iteration,
    pexpr_text,
    seq,
)

LAWS = ("tau1", "tau2", "iter", "defs")
DIRECTIONS = ("forward", "reverse")


class LawError(Exception):
    """A rule failed to match where the script demanded it."""


def _children(p: ProcessExpr) -> tuple[ProcessExpr, ...]:
    if isinstance(p, Seq):
        return (p.left, p.right)
    if isinstance(p, Alt):
        return p.alts
    if isinstance(p, Par):
        return p.parts
    if isinstance(p, (Sum, Guard, Encaps, Hide, Prio)):
        return (p.body,)
    if isinstance(p, Disrupt):
        return (p.body, p.interrupter)
    if isinstance(p, Iter):
        return (p.body, p.exit)
    return ()


def _rebuild(p: ProcessExpr, kids: tuple[ProcessExpr, ...]) -> ProcessExpr:
    if isinstance(p, Seq):
        return seq(kids[0], kids[1])
    if isinstance(p, Alt):
        return alt(*kids)
    if isinstance(p, Par):
        from .process import par

        return par(*kids)
    if isinstance(p, Sum):
        return Sum(p.var, p.sort, kids[0])
    if isinstance(p, Guard):
        return Guard(p.lhs, p.rhs, kids[0])
    if isinstance(p, Encaps):
        return Encaps(p.atoms, kids[0])
    if isinstance(p, Hide):
        return Hide(p.atoms, kids[0])
    if isinstance(p, Prio):
        return Prio(p.high, kids[0])
    if isinstance(p, Disrupt):
        return Disrupt(kids[0], kids[1])
    if isinstance(p, Iter):
        return iteration(kids[0], kids[1])
    raise LawError(f"cannot rebuild {p!r}")


def subterm_at(p: ProcessExpr, position: tuple[int, ...]) -> ProcessExpr:
    cur = p
    for i in position:
        kids = _children(cur)
        if i >= len(kids):
            raise LawError(f"position {'.'.join(map(str, position))} does not exist")
        cur = kids[i]
    return cur


def replace_at(
    p: ProcessExpr, position: tuple[int, ...], replacement: ProcessExpr
) -> ProcessExpr:
    if not position:
        return replacement
    kids = list(_children(p))
    i = position[0]
    if i >= len(kids):
        raise LawError(f"position {'.'.join(map(str, position))} does not exist")
    kids[i] = replace_at(kids[i], position[1:], replacement)
    return _rebuild(p, tuple(kids))


# --------------------------------------------------------------------------
# Single-law redex matching


def _apply_tau1_forward(p: ProcessExpr) -> Optional[ProcessExpr]:
    # x . tau . y  ->  x . y      (canonical Seq is right-nested)
    if isinstance(p, Seq):
        r = p.right
        if isinstance(r, Seq) and r.left is SKIP:
            return seq(p.left, r.right)
        if r is SKIP:
            return p.left
    return None


def _apply_tau1_reverse(p: ProcessExpr) -> Optional[ProcessExpr]:
    # x . y -> x . tau . y: inserts the silent step after the head.
    if isinstance(p, Seq):
        return Seq(p.left, seq(SKIP, p.right))
    return None


def _apply_iter_forward(p: ProcessExpr) -> Optional[ProcessExpr]:
    if isinstance(p, Iter):
        return alt(seq(p.body, p), p.exit)
    return None


def _apply_iter_reverse(p: ProcessExpr) -> Optional[ProcessExpr]:
    # x . (x * y) + y  ->  x * y
    if not isinstance(p, Alt):
        return None
    for cand in p.alts:
        if isinstance(cand, Seq):
            it = _trailing_iter(cand)
            if it is None:
                continue
            prefix, loop = it
            if prefix is loop.body:
                rest = [a for a in p.alts if a is not cand]
                if len(rest) == 1 and rest[0] is loop.exit:
                    return loop
    return None


def _trailing_iter(s: Seq) -> Optional[tuple[ProcessExpr, Iter]]:
    """Split ``prefix . (x * y)`` of a right-nested Seq; None otherwise."""
    parts = []
    cur: ProcessExpr = s
    while isinstance(cur, Seq):
        parts.append(cur.left)
        cur = cur.right
    if isinstance(cur, Iter) and parts:
        prefix = parts[0]
        for q in parts[1:]:
            prefix = seq_append(prefix, q)
        return prefix, cur
    return None


def seq_append(head: ProcessExpr, tail_piece: ProcessExpr) -> ProcessExpr:
    """Append one factor to a (right-nested) sequential composition."""
    if isinstance(head, Seq):
        return Seq(head.left, seq_append(head.right, tail_piece))
    return Seq(head, tail_piece)


def _apply_tau2_forward(p: ProcessExpr) -> Optional[ProcessExpr]:
    # x . (y + tau . z)  ->  x . (y + tau . z) + x . z
    if isinstance(p, Seq) and isinstance(p.right, Alt):
        for summand in p.right.alts:
            if isinstance(summand, Seq) and summand.left is SKIP:
                z = summand.right
                return alt(p, seq(p.left, z))
    return None


def _apply_tau2_reverse(p: ProcessExpr) -> Optional[ProcessExpr]:
    # x . (y + tau . z) + x . z  ->  x . (y + tau . z)
    if not isinstance(p, Alt):
        return None
    for big in p.alts:
        if not (isinstance(big, Seq) and isinstance(big.right, Alt)):
            continue
        x = big.left
        for summand in big.right.alts:
            if isinstance(summand, Seq) and summand.left is SKIP:
                z = summand.right
                rest = [a for a in p.alts if a is not big]
                if len(rest) == 1 and rest[0] is seq(x, z):
                    return big
    return None


def _defs_forward(p: ProcessExpr, env_defs) -> Optional[ProcessExpr]:
    if isinstance(p, Call) and not p.args and p.name in env_defs:
        params, body = env_defs[p.name]
        if not params:
            return body
    return None


def _defs_reverse(p: ProcessExpr, env_defs, name: Optional[str]) -> Optional[ProcessExpr]:
    names = [name] if name else sorted(env_defs)
    for n in names:
        entry = env_defs.get(n)
        if entry is None:
            continue
        params, body = entry
        if not params and body is p:
            return Call(n)
    return None


def apply_law(
    p: ProcessExpr,
    law: str,
    direction: str = "forward",
    position: Optional[tuple[int, ...]] = None,
    env_defs: Optional[dict] = None,
    def_name: Optional[str] = None,
) -> ProcessExpr:
    """Apply one law once; at ``position`` if given, else leftmost-outermost.

    Raises :class:`LawError` naming the law and the term when nothing
    matches — silent no-ops would let golden derivations drift.
    """
    if law not in LAWS:
        raise LawError(f"unknown law {law!r}")
    if direction not in DIRECTIONS:
        raise LawError(f"unknown direction {direction!r}")
    env_defs = env_defs or {}

    def attempt(node: ProcessExpr) -> Optional[ProcessExpr]:
        if law == "tau1":
            return (
                _apply_tau1_forward(node)
                if direction == "forward"
                else _apply_tau1_reverse(node)
            )
        if law == "tau2":
            return (
                _apply_tau2_forward(node)
                if direction == "forward"
                else _apply_tau2_reverse(node)
            )
        if law == "iter":
            return (
                _apply_iter_forward(node)
                if direction == "forward"
                else _apply_iter_reverse(node)
            )
        return (
            _defs_forward(node, env_defs)
            if direction == "forward"
            else _defs_reverse(node, env_defs, def_name)
        )

    if position is not None:
        node = subterm_at(p, position)
        repl = attempt(node)
        if repl is None:
            raise LawError(
                f"law {law} ({direction}) does not match at position "
                f"{'.'.join(map(str, position)) or 'root'} in: {pexpr_text(node)}"
            )
        return replace_at(p, position, repl)

    found = _leftmost_outermost(p, attempt)
    if found is None:
        raise LawError(f"law {law} ({direction}) does not match in: {pexpr_text(p)}")
    pos, repl = found
    return replace_at(p, pos, repl)


def _leftmost_outermost(p: ProcessExpr, attempt):
    queue: list[tuple[tuple[int, ...], ProcessExpr]] = [((), p)]
    while queue:
        pos, node = queue.pop(0)
        repl = attempt(node)
        if repl is not None:
            return pos, repl
        kids = _children(node)
        queue = [
            (pos + (i,), k) for i, k in enumerate(kids)
        ] + queue
    return None


def apply_tau_laws(
    p: ProcessExpr,
    rules: Iterable[tuple],
    env_defs: Optional[dict] = None,
) -> ProcessExpr:
    """Apply ``(law, direction[, position][, def_name])`` entries in order."""
    cur = p
    for k, rule in enumerate(rules):
        law, direction = rule[0], rule[1]
        position = rule[2] if len(rule) > 2 else None
        def_name = rule[3] if len(rule) > 3 else None
        try:
            cur = apply_law(
                cur, law, direction, position, env_defs=env_defs, def_name=def_name
            )
        except LawError as e:
            raise LawError(f"step {k + 1}: {e}") from None
    return cur
