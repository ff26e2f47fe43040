"""Finite labeled transition systems with a distinguished silent label.

State 0 is the root.  Successful termination is a marker on states (the
expansion produces at most one such state); delta is the absence of
transitions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .process import Action, TAU


class LtsError(Exception):
    """Operation refused (e.g. analysis on a truncated LTS)."""


@dataclass(frozen=True)
class Lts:
    n_states: int
    transitions: tuple[tuple[int, Action, int], ...]
    terminating: frozenset[int] = frozenset()
    truncated: bool = False
    state_exprs: Optional[tuple] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        for src, _a, dst in self.transitions:
            if not (0 <= src < self.n_states and 0 <= dst < self.n_states):
                raise LtsError(f"transition endpoint out of range: {(src, dst)}")

    @property
    def root(self) -> int:
        return 0

    def out_edges(self) -> list[list[tuple[Action, int]]]:
        table: list[list[tuple[Action, int]]] = [[] for _ in range(self.n_states)]
        for src, a, dst in self.transitions:
            table[src].append((a, dst))
        return table

    def labels(self) -> set[str]:
        return {label_text(a) for _s, a, _d in self.transitions}


def label_text(a: Action) -> str:
    return "tau" if a.is_tau else a.text()


def deadlock_states(lts: Lts) -> set[int]:
    """States with no outgoing transition that are not marked terminating.

    Refuses truncated systems: missing successors would make the answer
    unsound.
    """
    if lts.truncated:
        raise LtsError("deadlock analysis on a truncated LTS is unsound")
    has_out = [False] * lts.n_states
    for src, _a, _dst in lts.transitions:
        has_out[src] = True
    return {
        s
        for s in range(lts.n_states)
        if not has_out[s] and s not in lts.terminating
    }


def to_dot(lts: Lts, name: str = "lts") -> str:
    """GraphViz text: one node per state, one edge per transition."""
    lines = [f"digraph {name} {{"]
    lines.append('  node [shape=circle];')
    for s in range(lts.n_states):
        attrs = []
        if s == 0:
            attrs.append("style=bold")
        if s in lts.terminating:
            attrs.append("shape=doublecircle")
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f'  s{s} [label="{s}"]{suffix};')
    for src, a, dst in lts.transitions:
        lines.append(f'  s{src} -> s{dst} [label="{label_text(a)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_aut(lts: Lts) -> str:
    """Line-oriented text: ``des (root, #transitions, #states)`` header."""
    lines = [f"des (0, {len(lts.transitions)}, {lts.n_states})"]
    for src, a, dst in lts.transitions:
        lines.append(f'({src},"{label_text(a)}",{dst})')
    return "\n".join(lines) + "\n"


def from_aut(text: str) -> Lts:
    """Parse the ``des`` format produced by :func:`to_aut` (tests/tools)."""
    import re

    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = re.match(r"des \((\d+), (\d+), (\d+)\)", lines[0])
    if not head:
        raise LtsError("bad aut header")
    root, _ntr, nst = (int(x) for x in head.groups())
    if root != 0:
        raise LtsError("aut root must be state 0")
    transitions = []
    for ln in lines[1:]:
        m = re.match(r'\((\d+),"(.*)",(\d+)\)', ln)
        if not m:
            raise LtsError(f"bad aut line: {ln}")
        src, label, dst = int(m.group(1)), m.group(2), int(m.group(3))
        if label == "tau":
            a = Action(TAU)
        else:
            pm = re.match(r"([^()]+)\((.*)\)$", label)
            if pm:
                from .terms import Term

                args = tuple(
                    Term(x.strip()) for x in pm.group(2).split(",") if x.strip()
                )
                a = Action("visible", pm.group(1), args)
            else:
                a = Action("visible", label)
        transitions.append((src, a, dst))
    return Lts(n_states=nst, transitions=tuple(transitions))
