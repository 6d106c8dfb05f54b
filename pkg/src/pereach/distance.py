"""Bounded reachability (shortest path within a hop budget).

The reachability scheme carries over with Boolean disjunction replaced
by min-plus terms: each in-node equation lists (virtual node, local hop
count) candidates, plus a constant candidate when the target itself is
reachable inside the fragment. Segments longer than the budget cannot
appear on any witness path and are pruned at the fragment. Assembly is
a single-source Dijkstra run over the weighted dependency graph.
"""

from __future__ import annotations

import heapq
import math
from collections.abc import Mapping
from dataclasses import dataclass

from .graphs import Fragment, Fragmentation, NodeId, local_distances
from .reach import AssemblyError

#: Explicit "no path within the budget" marker.
INF = math.inf


@dataclass(frozen=True)
class BoundedQuery:
    source: NodeId
    target: NodeId
    bound: int

    def __post_init__(self) -> None:
        if self.bound < 0:
            raise ValueError(f"bound must be >= 0, got {self.bound}")


@dataclass(frozen=True)
class DistEquation:
    """Min-plus equation: X_lhs = min over terms of (weight + X_var).

    A term naming the query target stands for the constant candidate
    ``weight`` (the target costs nothing once reached). No terms means
    the in-node cannot reach the boundary or target within the budget.
    """

    lhs: NodeId
    terms: tuple[tuple[NodeId, int], ...]


def local_eval_d(f: Fragment, q: BoundedQuery, cutoff: int | None = None) -> tuple[DistEquation, ...]:
    """Min-plus equations for in-nodes (plus the source if local).

    ``cutoff`` defaults to the query bound; segments with hop count
    above it are dropped. Passing a larger cutoff only adds terms that
    can never win, which is how the pruning is validated.
    """
    limit = q.bound if cutoff is None else cutoff
    oset = set(f.virtual_nodes)
    if q.target in f.local_nodes:
        oset.add(q.target)
    iset = set(f.in_nodes)
    if q.source in f.local_nodes:
        iset.add(q.source)
    equations = []
    for v in sorted(iset):
        dist = local_distances(f, v)
        terms = tuple(
            (w, dist[w]) for w in sorted(oset) if w in dist and dist[w] <= limit
        )
        equations.append(DistEquation(v, terms))
    return tuple(equations)


@dataclass(frozen=True)
class WeightedDepGraph:
    """Weighted dependency graph; the target node costs zero itself."""

    nodes: frozenset[NodeId]
    edges: Mapping[NodeId, tuple[tuple[NodeId, int], ...]]
    target: NodeId


def collect_dist_equations(
    per_fragment: Mapping[int, tuple[DistEquation, ...]]
) -> dict[NodeId, tuple[tuple[NodeId, int], ...]]:
    defs: dict[NodeId, tuple[tuple[NodeId, int], ...]] = {}
    for i in sorted(per_fragment):
        for eq in per_fragment[i]:
            if eq.lhs in defs:
                raise AssemblyError(f"variable {eq.lhs!r} defined by two fragments")
            defs[eq.lhs] = eq.terms
    return defs


def build_weighted_dep_graph(
    defs: Mapping[NodeId, tuple[tuple[NodeId, int], ...]], q: BoundedQuery
) -> WeightedDepGraph:
    nodes = set(defs) | {q.target}
    for lhs, terms in defs.items():
        for w, _ in terms:
            if w != q.target and w not in defs:
                raise AssemblyError(f"dangling variable {w!r} in equation for {lhs!r}")
            nodes.add(w)
    return WeightedDepGraph(frozenset(nodes), dict(defs), q.target)


def eval_dg_d(
    defs: Mapping[NodeId, tuple[tuple[NodeId, int], ...]], q: BoundedQuery
) -> tuple[bool, int | float]:
    """Assemble: Dijkstra from the source variable to the target.

    Returns (answer, distance); the distance is exact when it is within
    the bound and INF otherwise, never a speculative finite value.
    """
    if q.source not in defs:
        raise AssemblyError(f"no equation for source {q.source!r}")
    dg = build_weighted_dep_graph(defs, q)
    best: dict[NodeId, int] = {}
    heap: list[tuple[int, NodeId]] = [(0, q.source)]
    while heap:
        d, v = heapq.heappop(heap)
        if v in best:
            continue  # stale entry
        best[v] = d
        if v == q.target:
            break
        for w, weight in dg.edges.get(v, ()):
            if w not in best:
                heapq.heappush(heap, (d + weight, w))
    d = best.get(q.target, INF)
    if d <= q.bound:
        return True, d
    return False, INF


def dis_dist(frag: Fragmentation, q: BoundedQuery) -> tuple[bool, int | float]:
    """Distributed bounded reachability: one visit per fragment."""
    frag.require(q.source)
    frag.require(q.target)
    per_fragment = {f.id: local_eval_d(f, q) for f in frag.fragments}
    return eval_dg_d(collect_dist_equations(per_fragment), q)
