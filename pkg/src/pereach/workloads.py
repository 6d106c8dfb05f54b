"""Random instance generation for agreement checks and benchmarks.

Also builds paired graphs whose fragments share an identical boundary
but differ by orders of magnitude in interior size; the traffic of the
partial-evaluation run must not see the difference.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .automaton import Atom, Concat, Epsilon, RegexAst, Star, Union, Wildcard, build_query_automaton
from .distance import BoundedQuery
from .graphs import Graph, NodeId
from .reach import ReachQuery
from .regular import RegularQuery

KINDS = ("reach", "bdreach", "regreach")

Query = ReachQuery | BoundedQuery | RegularQuery


@dataclass(frozen=True)
class Instance:
    graph: Graph
    k: int
    partition_seed: int
    kind: str
    query: Query


def random_graph(rng: random.Random, n_nodes: int, n_edges: int, alphabet: list[str]) -> Graph:
    nodes = [f"n{i:03d}" for i in range(n_nodes)]
    labels = {v: rng.choice(alphabet) for v in nodes}
    edges = set()
    for _ in range(n_edges):
        edges.add((rng.choice(nodes), rng.choice(nodes)))
    return Graph.build(labels, sorted(edges))


def random_ast(rng: random.Random, size: int, alphabet: list[str]) -> RegexAst:
    """A pattern with exactly ``size`` constructors."""
    if size <= 1:
        r = rng.random()
        if r < 0.15:
            return Epsilon()
        if r < 0.35:
            return Wildcard()
        return Atom(rng.choice(alphabet))
    if size == 2 or rng.random() < 0.3:
        return Star(random_ast(rng, size - 1, alphabet))
    left = rng.randint(1, size - 2)
    ctor = Concat if rng.random() < 0.5 else Union
    return ctor(random_ast(rng, left, alphabet), random_ast(rng, size - 1 - left, alphabet))


def random_instance(
    rng: random.Random,
    kind: str,
    max_nodes: int = 200,
    max_edges: int = 800,
    max_k: int = 5,
    max_pattern_size: int = 6,
    max_alphabet: int = 5,
) -> Instance:
    if rng.random() < 0.85:
        n = rng.randint(2, min(60, max_nodes))
    else:
        n = rng.randint(2, max_nodes)
    m = rng.randint(n // 2, min(max_edges, 3 * n))
    alphabet = [chr(ord("a") + i) for i in range(rng.randint(1, max_alphabet))]
    g = random_graph(rng, n, m, alphabet)
    nodes = sorted(g.nodes)
    s = rng.choice(nodes)
    t = s if rng.random() < 0.05 else rng.choice(nodes)
    if kind == "reach":
        query: Query = ReachQuery(s, t)
    elif kind == "bdreach":
        query = BoundedQuery(s, t, rng.randint(0, max(2, n // 2)))
    elif kind == "regreach":
        ast = random_ast(rng, rng.randint(1, max_pattern_size), alphabet)
        query = RegularQuery(s, t, build_query_automaton(ast))
    else:
        raise ValueError(f"unknown query kind {kind!r}")
    return Instance(
        graph=g,
        k=rng.randint(1, min(max_k, n)),
        partition_seed=rng.randrange(2**32),
        kind=kind,
        query=query,
    )


def random_instances(
    seed: int,
    count: int,
    kinds: tuple[str, ...] = KINDS,
    max_nodes: int = 200,
    max_edges: int = 800,
    max_k: int = 5,
) -> list[Instance]:
    """Deterministic instance list cycling through the query kinds."""
    rng = random.Random(seed)
    return [
        random_instance(rng, kinds[i % len(kinds)], max_nodes=max_nodes, max_edges=max_edges, max_k=max_k)
        for i in range(count)
    ]


def boundary_ring(k: int, interior: int) -> tuple[Graph, dict[NodeId, int]]:
    """k fragments in a ring with ``interior`` padding nodes each.

    Fragment i holds in-node I{i}, relay R{i} and border B{i}, all
    labeled "a", with the only cross edge B{i} -> I{i+1 mod k}. Padding
    nodes hang off the in-node as dead ends, so boundary sets and the
    in-node to virtual-node relations are the same for every interior
    size; only the fragment bulk grows.
    """
    if k < 2:
        raise ValueError("the ring needs at least two fragments")
    labels: dict[NodeId, str] = {}
    edges: list[tuple[NodeId, NodeId]] = []
    assignment: dict[NodeId, int] = {}
    for i in range(k):
        inn, relay, border = f"I{i}", f"R{i}", f"B{i}"
        for v in (inn, relay, border):
            labels[v] = "a"
            assignment[v] = i
        edges.append((inn, relay))
        edges.append((relay, border))
        edges.append((border, f"I{(i + 1) % k}"))
        for j in range(interior):
            pad = f"P{i}x{j}"
            labels[pad] = "b"
            assignment[pad] = i
            edges.append((inn, pad))
    return Graph.build(labels, edges), assignment


def ring_queries(k: int) -> tuple[ReachQuery, BoundedQuery, RegularQuery]:
    """Queries from I0 to the far side of the ring, all answered true."""
    s, t = "I0", f"I{k - 1}"
    # the witness path hops k-1 fragments, three edges each
    return (
        ReachQuery(s, t),
        BoundedQuery(s, t, 3 * (k - 1)),
        RegularQuery(s, t, build_query_automaton(Star(Atom("a")))),
    )
