"""Independent test oracles, deliberately implemented unlike the library.

* branching bisimilarity as a greatest-fixpoint computation over the full
  relation (iterated removal of violating pairs), with explicit tau-path
  searches — no partition refinement, no SCC collapse;
* a depth-1 unfolder for raw ACP definitions;
* a time-stepped list-scheduling simulator.
"""

from __future__ import annotations

from psfkit.lts import Lts


def _edges(lts: Lts):
    out = [[] for _ in range(lts.n_states)]
    for s, a, d in lts.transitions:
        lbl = "tau" if a.is_tau else (a.name,) + a.args
        out[s].append((lbl, d))
    return out


def _tau_reach(edges, s):
    """All states reachable from s via tau steps (reflexive-transitive)."""
    seen = {s}
    stack = [s]
    while stack:
        v = stack.pop()
        for lbl, d in edges[v]:
            if lbl == "tau" and d not in seen:
                seen.add(d)
                stack.append(d)
    return seen


def branching_bisim_oracle(l1: Lts, l2: Lts, respect_termination: bool = False) -> bool:
    """Greatest branching bisimulation by pair elimination, then rootedness."""
    n1, n2 = l1.n_states, l2.n_states
    e = _edges(l1) + [
        [(lbl, d + n1) for lbl, d in row] for row in _edges(l2)
    ]
    term = set(l1.terminating) | {s + n1 for s in l2.terminating}
    n = n1 + n2

    related = [[True] * n for _ in range(n)]
    if respect_termination:
        for s in range(n):
            for t in range(n):
                if (s in term) != (t in term):
                    related[s][t] = False

    tau_reach = [_tau_reach(e, s) for s in range(n)]

    def ok(s: int, t: int) -> bool:
        for lbl, sp in e[s]:
            if lbl == "tau" and related[sp][t]:
                continue
            good = False
            for t2 in tau_reach[t]:
                if not related[s][t2]:
                    continue
                for lbl2, tp in e[t2]:
                    if lbl2 == lbl and related[sp][tp]:
                        good = True
                        break
                if good:
                    break
            if not good:
                return False
        return True

    changed = True
    while changed:
        changed = False
        for s in range(n):
            for t in range(n):
                if related[s][t] and not (ok(s, t) and ok(t, s)):
                    related[s][t] = False
                    changed = True

    root1, root2 = 0, n1
    if not related[root1][root2]:
        return False

    def rooted(s: int, t: int) -> bool:
        for lbl, sp in e[s]:
            if not any(
                lbl2 == lbl and related[sp][tp] for lbl2, tp in e[t]
            ):
                return False
        return True

    return rooted(root1, root2) and rooted(root2, root1)


def depth1_enumeration(env, definitions: dict, expr) -> set:
    """First-action set by naive unfolding against the raw definitions.

    Independent of psfkit.semantics.step: a direct recursive reading of
    the ACP rules, without canonical forms or caching.  Returns action
    texts only.
    """
    from psfkit.process import (
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
        Seq,
        Sum,
        substitute_expr,
    )

    def firsts(p, fuel: int) -> list:
        if fuel <= 0:
            raise RuntimeError("depth budget")
        if p.KIND == "term":
            return []
        if isinstance(p, Act):
            return [] if p.action.is_delta else [p.action]
        if isinstance(p, Seq):
            return firsts(p.left, fuel - 1)
        if isinstance(p, Alt):
            out = []
            for c in p.alts:
                out.extend(firsts(c, fuel - 1))
            return out
        if isinstance(p, Par):
            out = []
            rows = [firsts(c, fuel - 1) for c in p.parts]
            for row in rows:
                out.extend(row)
            for i in range(len(rows)):
                for j in range(len(rows)):
                    if i >= j:
                        continue
                    for a in rows[i]:
                        for b in rows[j]:
                            c = env.comm.communicate(a, b)
                            if c is not None:
                                out.append(c)
            return out
        if isinstance(p, Sum):
            out = []
            for v in env.universe(p.sort):
                out.extend(firsts(substitute_expr(p.body, {p.var: v}), fuel - 1))
            return out
        if isinstance(p, Guard):
            lhs = env.rewriter.normalize(p.lhs)
            rhs = env.rewriter.normalize(p.rhs)
            return firsts(p.body, fuel - 1) if lhs is rhs else []
        if isinstance(p, Encaps):
            return [
                a
                for a in firsts(p.body, fuel - 1)
                if not (a.kind == "visible" and p.atoms.contains(a))
            ]
        if isinstance(p, Hide):
            from psfkit.process import Action, TAU

            return [
                Action(TAU) if a.kind == "visible" and p.atoms.contains(a) else a
                for a in firsts(p.body, fuel - 1)
            ]
        if isinstance(p, Prio):
            ts = firsts(p.body, fuel - 1)
            if any(a.kind == "visible" and p.high.contains(a) for a in ts):
                ts = [a for a in ts if a.kind == "visible" and p.high.contains(a)]
            return ts
        if isinstance(p, Disrupt):
            return firsts(p.body, fuel - 1) + firsts(p.interrupter, fuel - 1)
        if isinstance(p, Iter):
            return firsts(p.body, fuel - 1) + firsts(p.exit, fuel - 1)
        if isinstance(p, Call):
            params, body = definitions[p.name]
            if params:
                body = substitute_expr(body, dict(zip(params, p.args)))
            return firsts(body, fuel - 1)
        raise RuntimeError(f"unhandled {p!r}")

    return {a.text() for a in firsts(expr, 200)}


def list_schedule_makespan(info, n_parse: int, n_norm: int, costs=None) -> float:
    """Brute-force time-stepped list scheduler (greedy, same tie-break)."""
    modules = sorted(info.modules)
    rank = {m: i for i, m in enumerate(info.topo_order())}
    parse_left = {m for m in modules if info.needs_parse(m)}
    norm_left = {m for m in modules if info.needs_normalize(m)}
    parsed = {m for m in modules if m not in parse_left}
    normalized = {m for m in modules if m not in norm_left}

    def cost(kind, m):
        if costs is None:
            return 1.0
        return float(costs(kind, m))

    running: list[tuple[float, str, str]] = []  # (end, kind, module)
    t = 0.0
    while parse_left or norm_left or running:
        free_p = n_parse - sum(1 for _e, k, _m in running if k == "parse")
        free_n = n_norm - sum(1 for _e, k, _m in running if k == "normalize")
        ready_p = sorted(parse_left, key=lambda m: (rank[m], m))
        ready_n = sorted(
            (
                m
                for m in norm_left
                if m in parsed
                and all(
                    i in normalized or not info.needs_normalize(i)
                    for i in info.imports_of(m)
                )
            ),
            key=lambda m: (rank[m], m),
        )
        progress = False
        while free_p > 0 and ready_p:
            m = ready_p.pop(0)
            parse_left.discard(m)
            running.append((t + cost("parse", m), "parse", m))
            free_p -= 1
            progress = True
        while free_n > 0 and ready_n:
            m = ready_n.pop(0)
            norm_left.discard(m)
            running.append((t + cost("normalize", m), "normalize", m))
            free_n -= 1
            progress = True
        if not running:
            if not progress:
                raise RuntimeError("scheduling stuck")
            continue
        running.sort()
        t = running[0][0]
        done = [r for r in running if r[0] <= t]
        running = [r for r in running if r[0] > t]
        for _e, k, m in done:
            if k == "parse":
                parsed.add(m)
            else:
                normalized.add(m)
    return t
