"""Rooted branching bisimulation checking via partition refinement.

Tau-cycles are collapsed first (sound for the divergence-blind relation),
then the partition is refined by state signatures until stable; rootedness
is checked last on the initial transitions.

Successful-termination markers are ignored by default: the architecture
extraction chains compare looping components (iteration with a delta exit)
against harness forms that terminate, and those are only equivalent when
the tick is not observable.  Pass ``respect_termination=True`` for the
strict relation.
"""

from __future__ import annotations

from .lts import Lts, LtsError


def branching_bisim(l1: Lts, l2: Lts, respect_termination: bool = False) -> bool:
    """True iff the roots are rooted-branching-bisimilar."""
    if l1.truncated or l2.truncated:
        raise LtsError("branching bisimulation on truncated LTS refused")
    n1 = l1.n_states
    n = n1 + l2.n_states
    edges: list[list[tuple[object, int]]] = [[] for _ in range(n)]
    for src, a, dst in l1.transitions:
        edges[src].append((_label(a), dst))
    for src, a, dst in l2.transitions:
        edges[src + n1].append((_label(a), dst + n1))
    terminating = set(l1.terminating) | {s + n1 for s in l2.terminating}

    rep, redges, rterm = _collapse_tau_sccs(n, edges, terminating)
    part = _refine(len(redges), redges, rterm if respect_termination else None)

    r1, r2 = rep[0], rep[n1]
    if part[r1] != part[r2]:
        return False
    # Rooted condition over the *original* initial moves (a tau self-loop
    # at the root still counts as an initial move the other side must match).
    menu1 = {(lbl, part[rep[d]]) for lbl, d in edges[0]}
    menu2 = {(lbl, part[rep[d]]) for lbl, d in edges[n1]}
    return menu1 == menu2


def _label(a) -> object:
    return "τ" if a.is_tau else (a.name,) + a.args


def _collapse_tau_sccs(n, edges, terminating):
    """Collapse strongly connected components of tau edges (Tarjan)."""
    index = [0] * n
    low = [0] * n
    on_stack = [False] * n
    comp = [-1] * n
    stack: list[int] = []
    counter = [1]
    ncomp = [0]

    tau_succ = [[d for (lbl, d) in edges[s] if lbl == "τ"] for s in range(n)]

    def strongconnect(v0: int):
        work = [(v0, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter[0]
                counter[0] += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            succs = tau_succ[v]
            while pi < len(succs):
                w = succs[pi]
                pi += 1
                if index[w] == 0:
                    work[-1] = (v, pi)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            if pi >= len(succs):
                if low[v] == index[v]:
                    while True:
                        w = stack.pop()
                        on_stack[w] = False
                        comp[w] = ncomp[0]
                        if w == v:
                            break
                    ncomp[0] += 1
                work.pop()
                if work:
                    pv, _ = work[-1]
                    low[pv] = min(low[pv], low[v])

    for v in range(n):
        if index[v] == 0:
            strongconnect(v)

    m = ncomp[0]
    redges: list[list[tuple[object, int]]] = [[] for _ in range(m)]
    seen: list[set] = [set() for _ in range(m)]
    for s in range(n):
        cs = comp[s]
        for lbl, d in edges[s]:
            cd = comp[d]
            if lbl == "τ" and cs == cd:
                continue
            key = (lbl, cd)
            if key not in seen[cs]:
                seen[cs].add(key)
                redges[cs].append(key)
    rterm = {comp[s] for s in terminating}
    return comp, redges, rterm


def _refine(n, edges, terminating):
    """Signature refinement for branching bisimulation.

    ``sig(s)`` is the set of (label, target block) pairs reachable through
    inert tau paths inside s's current block; inert tau moves themselves do
    not appear.  Iterates to a fixpoint.
    """
    if terminating is not None:
        part = [1 if s in terminating else 0 for s in range(n)]
    else:
        part = [0] * n
    nblocks = len(set(part)) or 1
    while True:
        sigs: list[frozenset] = [frozenset()] * n
        order = _stable_tau_topo(n, edges, part)
        sig_acc: list[set] = [set() for _ in range(n)]
        for s in order:
            acc = sig_acc[s]
            for lbl, d in edges[s]:
                if lbl == "τ" and part[d] == part[s]:
                    acc |= sig_acc[d]
                else:
                    acc.add((lbl, part[d]))
            sigs[s] = frozenset(acc)
        key_of: dict[tuple, int] = {}
        new_part = [0] * n
        for s in range(n):
            key = (part[s], sigs[s])
            blk = key_of.get(key)
            if blk is None:
                blk = len(key_of)
                key_of[key] = blk
            new_part[s] = blk
        if len(key_of) == nblocks:
            return new_part
        part = new_part
        nblocks = len(key_of)


def _stable_tau_topo(n, edges, part):
    """Process states so inert-tau successors are accumulated first.

    After tau-SCC collapse the inert-tau graph is acyclic, so a reverse
    topological order exists.
    """
    succ = [
        [d for (lbl, d) in edges[s] if lbl == "τ" and part[d] == part[s]]
        for s in range(n)
    ]
    state = [0] * n
    order: list[int] = []
    for s0 in range(n):
        if state[s0]:
            continue
        stack = [(s0, 0)]
        state[s0] = 1
        while stack:
            v, pi = stack[-1]
            if pi < len(succ[v]):
                stack[-1] = (v, pi + 1)
                w = succ[v][pi]
                if not state[w]:
                    state[w] = 1
                    stack.append((w, 0))
            else:
                order.append(v)
                state[v] = 2
                stack.pop()
    return order


