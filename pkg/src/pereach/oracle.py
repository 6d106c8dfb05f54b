"""Centralized reference answers over the whole, unfragmented graph.

Everything here is deliberately independent of the partial evaluators:
plain breadth-first traversals over the raw graph, plus a fixpoint
iterator for Boolean equation systems. Tests hold the distributed
results against these.
"""

from __future__ import annotations

import math
from collections import deque
from collections.abc import Mapping
from dataclasses import dataclass

from .automaton import QueryAutomaton
from .graphs import Graph, NodeId, UnknownNodeError
from .reach import AssemblyError, Formula

INF = math.inf


def _require(g: Graph, v: NodeId) -> None:
    if v not in g.nodes:
        raise UnknownNodeError(f"unknown node {v!r}")


def oracle_reach(g: Graph, s: NodeId, t: NodeId) -> bool:
    """BFS reachability; every node reaches itself."""
    _require(g, s)
    _require(g, t)
    seen = {s}
    queue = deque([s])
    while queue:
        v = queue.popleft()
        if v == t:
            return True
        for w in g.edges[v]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return False


def oracle_dist(g: Graph, s: NodeId, t: NodeId) -> int | float:
    """Hop distance from s to t, INF when unreachable."""
    _require(g, s)
    _require(g, t)
    dist = {s: 0}
    queue = deque([s])
    while queue:
        v = queue.popleft()
        if v == t:
            return dist[v]
        for w in g.edges[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return INF


def oracle_regular(g: Graph, s: NodeId, t: NodeId, a: QueryAutomaton) -> bool:
    """BFS over the graph-automaton product.

    A pair (v, u) means v is matched at state u; start and final match
    the endpoints by identity, interior states match node labels. The
    zero-length path answers source == target when the empty word is in
    the language.
    """
    _require(g, s)
    _require(g, t)
    if s == t and (a.start, a.final) in a.transitions:
        return True
    target = (t, a.final)
    seen = {(s, a.start)}
    queue = deque([(s, a.start)])
    while queue:
        v, u = queue.popleft()
        if (v, u) == target:
            return True
        for w in g.edges[v]:
            for u2 in a.successor_states(u):
                if u2 == a.start:
                    continue
                if u2 == a.final:
                    ok = w == t
                else:
                    lbl = a.state_label[u2]
                    ok = lbl is None or lbl == g.labels[w]
                if ok and (w, u2) not in seen:
                    seen.add((w, u2))
                    queue.append((w, u2))
    return False


def kleene_solve(defs: Mapping[NodeId, Formula]) -> dict[NodeId, bool]:
    """Least fixpoint of a Boolean equation system by naive iteration.

    Starts everything at false and reapplies all equations until no
    value changes; at most one variable flips to true per round, so the
    loop is bounded.
    """
    for lhs, rhs in defs.items():
        for w in rhs.vars:
            if w not in defs:
                raise AssemblyError(f"dangling variable {w!r} in equation for {lhs!r}")
    value = {v: False for v in defs}
    changed = True
    while changed:
        changed = False
        for v, rhs in defs.items():
            new = rhs.is_true or any(value[w] for w in rhs.vars)
            if new and not value[v]:
                value[v] = True
                changed = True
    return value


@dataclass(frozen=True)
class OracleResult:
    reachable: bool
    distance: int | float
    regular_match: bool


def oracle_eval(g: Graph, s: NodeId, t: NodeId, a: QueryAutomaton | None = None) -> OracleResult:
    """All three reference answers at once.

    Without an automaton the regular field uses the match-anything
    pattern, which coincides with plain reachability.
    """
    if a is None:
        from .automaton import build_query_automaton, parse_regex

        a = build_query_automaton(parse_regex("_*"))
    d = oracle_dist(g, s, t)
    return OracleResult(
        reachable=d != INF,
        distance=d,
        regular_match=oracle_regular(g, s, t, a),
    )
