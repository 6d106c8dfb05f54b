"""Directed labeled graphs, fragmentations, and boundary bookkeeping.

A graph is a set of labeled nodes plus a directed adjacency map. A
fragmentation splits the node set into fragments. Edges that leave a
fragment become cross edges whose targets are kept as virtual nodes,
placeholders for nodes stored elsewhere, and nodes that receive cross
edges from other fragments are in-nodes. The fragment graph collects all
boundary nodes and cross edges; together with per-fragment partial
answers it is all an assembler ever needs.

Graph file format (UTF-8, line oriented)::

    #nodes
    <node-id> <label>
    #edges
    <src-id> <dst-id>

Ids and labels are whitespace-free tokens. Lines starting with ``#``
other than the two section headers are comments; blank lines are
ignored. A partition file holds one ``<node-id> <fragment-index>`` pair
per line, indices contiguous from 0.
"""

from __future__ import annotations

import hashlib
from collections import deque
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

NodeId = str
Label = str


class GraphFormatError(ValueError):
    """A graph or partition document is malformed."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class PartitionError(ValueError):
    """A fragment assignment is invalid for the given graph."""


class UnknownNodeError(ValueError):
    """A query or lookup names a node the graph does not contain."""


@dataclass(frozen=True)
class Graph:
    """Immutable directed graph with one label per node.

    ``edges`` keys every node, parallel edges are collapsed, and the
    target order per source follows first occurrence.
    """

    nodes: frozenset[NodeId]
    labels: Mapping[NodeId, Label]
    edges: Mapping[NodeId, tuple[NodeId, ...]]

    @classmethod
    def build(cls, labels: Mapping[NodeId, Label], edges: Iterable[tuple[NodeId, NodeId]]) -> Graph:
        nodes = frozenset(labels)
        adjacency: dict[NodeId, list[NodeId]] = {v: [] for v in labels}
        seen: set[tuple[NodeId, NodeId]] = set()
        for src, dst in edges:
            if src not in nodes:
                raise UnknownNodeError(f"edge source {src!r} is not a declared node")
            if dst not in nodes:
                raise UnknownNodeError(f"edge target {dst!r} is not a declared node")
            if (src, dst) in seen:
                continue
            seen.add((src, dst))
            adjacency[src].append(dst)
        return cls(nodes, dict(labels), {v: tuple(ws) for v, ws in adjacency.items()})

    def successors(self, v: NodeId) -> tuple[NodeId, ...]:
        try:
            return self.edges[v]
        except KeyError:
            raise UnknownNodeError(f"unknown node {v!r}") from None

    def label(self, v: NodeId) -> Label:
        try:
            return self.labels[v]
        except KeyError:
            raise UnknownNodeError(f"unknown node {v!r}") from None

    @property
    def n_edges(self) -> int:
        return sum(len(ws) for ws in self.edges.values())


def parse_graph(text: str) -> Graph:
    """Parse a graph document. Raises GraphFormatError with a line number."""
    labels: dict[NodeId, Label] = {}
    edges: list[tuple[NodeId, NodeId]] = []
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line == "#nodes":
            if section is not None:
                raise GraphFormatError("duplicate #nodes header", lineno)
            section = "nodes"
            continue
        if line == "#edges":
            if section != "nodes":
                raise GraphFormatError("#edges header before #nodes", lineno)
            section = "edges"
            continue
        if line.startswith("#"):
            continue
        tokens = line.split()
        if section is None:
            raise GraphFormatError("expected #nodes header before data", lineno)
        if section == "nodes":
            if len(tokens) != 2:
                raise GraphFormatError(f"malformed node line {line!r}", lineno)
            node, label = tokens
            if node in labels:
                raise GraphFormatError(f"duplicate node {node!r}", lineno)
            labels[node] = label
        else:
            if len(tokens) != 2:
                raise GraphFormatError(f"malformed edge line {line!r}", lineno)
            src, dst = tokens
            if src not in labels:
                raise GraphFormatError(f"edge references undeclared node {src!r}", lineno)
            if dst not in labels:
                raise GraphFormatError(f"edge references undeclared node {dst!r}", lineno)
            edges.append((src, dst))
    if section is None:
        raise GraphFormatError("empty document, expected #nodes header")
    return Graph.build(labels, edges)


def format_graph(g: Graph) -> str:
    """Canonical text form: sorted nodes, then sorted edges."""
    lines = ["#nodes"]
    lines.extend(f"{v} {g.labels[v]}" for v in sorted(g.nodes))
    lines.append("#edges")
    lines.extend(f"{u} {w}" for u in sorted(g.nodes) for w in sorted(g.edges[u]))
    return "\n".join(lines) + "\n"


def fragment_document(f: "Fragment") -> str:
    """Graph-format text for one fragment: its local and virtual nodes
    with labels, plus local and cross edges. Documents from all
    fragments of one graph union back to the original graph."""
    lines = ["#nodes"]
    lines.extend(f"{v} {f.labels[v]}" for v in sorted(f.members))
    lines.append("#edges")
    edges = [(u, w) for u, ws in f.local_edges.items() for w in ws]
    edges.extend(f.cross_edges)
    lines.extend(f"{u} {w}" for u, w in sorted(edges))
    return "\n".join(lines) + "\n"


def union_graphs(parts: Iterable[Graph]) -> Graph:
    """Union node/edge sets of overlapping graphs; labels must agree."""
    labels: dict[NodeId, Label] = {}
    edges: list[tuple[NodeId, NodeId]] = []
    for g in parts:
        for v, lbl in g.labels.items():
            if labels.setdefault(v, lbl) != lbl:
                raise GraphFormatError(f"conflicting labels for node {v!r}")
        edges.extend((u, w) for u, ws in g.edges.items() for w in ws)
    return Graph.build(labels, edges)


def parse_partition(text: str) -> dict[NodeId, int]:
    """Parse a partition document into a node to fragment-index map."""
    assignment: dict[NodeId, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise GraphFormatError(f"malformed partition line {line!r}", lineno)
        node, idx = tokens
        if node in assignment:
            raise GraphFormatError(f"node {node!r} assigned twice", lineno)
        try:
            assignment[node] = int(idx)
        except ValueError:
            raise GraphFormatError(f"bad fragment index {idx!r}", lineno) from None
        if assignment[node] < 0:
            raise GraphFormatError(f"negative fragment index {idx!r}", lineno)
    return assignment


def format_partition(assignment: Mapping[NodeId, int]) -> str:
    return "\n".join(f"{v} {assignment[v]}" for v in sorted(assignment)) + "\n"


@dataclass(frozen=True)
class Fragment:
    """One fragment: local nodes and edges plus its boundary.

    ``virtual_nodes`` are the targets of this fragment's cross edges
    (stored here only as labeled placeholders, no outgoing edges),
    ``in_nodes`` are the local nodes that other fragments' cross edges
    point at. Both are kept in lexicographic order; serialized payloads
    index into these tuples, so the order is part of the contract.
    ``labels`` covers local and virtual nodes.
    """

    id: int
    local_nodes: frozenset[NodeId]
    virtual_nodes: tuple[NodeId, ...]
    in_nodes: tuple[NodeId, ...]
    local_edges: Mapping[NodeId, tuple[NodeId, ...]]
    cross_edges: tuple[tuple[NodeId, NodeId], ...]
    labels: Mapping[NodeId, Label]

    def __post_init__(self) -> None:
        cross_out: dict[NodeId, list[NodeId]] = {}
        for u, w in self.cross_edges:
            cross_out.setdefault(u, []).append(w)
        object.__setattr__(self, "_cross_out", {u: tuple(ws) for u, ws in cross_out.items()})
        object.__setattr__(self, "_members", self.local_nodes | set(self.virtual_nodes))

    @property
    def members(self) -> frozenset[NodeId]:
        """Local plus virtual nodes."""
        return self._members  # type: ignore[attr-defined]

    def successors(self, v: NodeId) -> tuple[NodeId, ...]:
        """Local and cross successors; virtual nodes have none."""
        return self.local_edges.get(v, ()) + self._cross_out.get(v, ())  # type: ignore[attr-defined]


@dataclass(frozen=True)
class FragmentGraph:
    """All boundary nodes plus every cross edge."""

    nodes: frozenset[NodeId]
    edges: frozenset[tuple[NodeId, NodeId]]


@dataclass(frozen=True)
class Fragmentation:
    fragments: tuple[Fragment, ...]
    fragment_of: Mapping[NodeId, int]
    fragment_graph: FragmentGraph

    def __len__(self) -> int:
        return len(self.fragments)

    def require(self, v: NodeId) -> int:
        try:
            return self.fragment_of[v]
        except KeyError:
            raise UnknownNodeError(f"unknown node {v!r}") from None


def build_fragmentation(g: Graph, assignment: Mapping[NodeId, int]) -> Fragmentation:
    """Split ``g`` by a total node to fragment-index assignment.

    Indices must be contiguous from 0 and every fragment nonempty.
    """
    extra = set(assignment) - g.nodes
    if extra:
        raise PartitionError(f"assignment covers unknown nodes: {sorted(extra)[:3]}")
    missing = g.nodes - set(assignment)
    if missing:
        raise PartitionError(f"assignment misses nodes: {sorted(missing)[:3]}")
    used = set(assignment.values())
    k = max(used) + 1 if used else 0
    if used != set(range(k)):
        raise PartitionError("fragment indices must be contiguous from 0")

    locals_of: list[set[NodeId]] = [set() for _ in range(k)]
    for v, i in assignment.items():
        locals_of[i].add(v)

    in_nodes: list[set[NodeId]] = [set() for _ in range(k)]
    cross_of: list[list[tuple[NodeId, NodeId]]] = [[] for _ in range(k)]
    local_edges_of: list[dict[NodeId, list[NodeId]]] = [
        {v: [] for v in locals_of[i]} for i in range(k)
    ]
    for u in g.nodes:
        i = assignment[u]
        for w in g.edges[u]:
            if assignment[w] == i:
                local_edges_of[i][u].append(w)
            else:
                cross_of[i].append((u, w))
                in_nodes[assignment[w]].add(w)

    fragments = []
    for i in range(k):
        virtual = tuple(sorted({w for _, w in cross_of[i]}))
        labels = {v: g.labels[v] for v in locals_of[i]}
        labels.update({w: g.labels[w] for w in virtual})
        fragments.append(
            Fragment(
                id=i,
                local_nodes=frozenset(locals_of[i]),
                virtual_nodes=virtual,
                in_nodes=tuple(sorted(in_nodes[i])),
                local_edges={v: tuple(ws) for v, ws in local_edges_of[i].items()},
                cross_edges=tuple(sorted(cross_of[i])),
                labels=labels,
            )
        )

    boundary: set[NodeId] = set()
    cross_all: set[tuple[NodeId, NodeId]] = set()
    for f in fragments:
        boundary.update(f.virtual_nodes)
        boundary.update(f.in_nodes)
        cross_all.update(f.cross_edges)
    return Fragmentation(
        fragments=tuple(fragments),
        fragment_of=dict(assignment),
        fragment_graph=FragmentGraph(frozenset(boundary), frozenset(cross_all)),
    )


def random_partition(g: Graph, k: int, seed: int) -> Fragmentation:
    """Deterministic balanced random partition into k fragments.

    Nodes are first placed by a keyed hash of their id, then rebalanced
    so fragment sizes differ by at most one.
    """
    n = len(g.nodes)
    if k < 1 or k > n:
        raise PartitionError(f"k must be in 1..{n}, got {k}")
    key = (seed & 0xFFFFFFFFFFFFFFFF).to_bytes(8, "big")
    assignment: dict[NodeId, int] = {}
    for v in sorted(g.nodes):
        digest = hashlib.blake2b(v.encode("utf-8"), digest_size=8, key=key).digest()
        assignment[v] = int.from_bytes(digest, "big") % k

    # lower-indexed fragments absorb the remainder of n / k
    base, rem = divmod(n, k)
    targets = [base + 1 if i < rem else base for i in range(k)]
    parts = [sorted(v for v, i in assignment.items() if i == j) for j in range(k)]
    pool: list[NodeId] = []
    for j in range(k):
        surplus = parts[j][targets[j]:]
        parts[j] = parts[j][: targets[j]]
        pool.extend(surplus)
    pool.sort()
    for j in range(k):
        while len(parts[j]) < targets[j]:
            node = pool.pop(0)
            parts[j].append(node)
            assignment[node] = j
    return build_fragmentation(g, assignment)


def descendants(f: Fragment, v: NodeId) -> frozenset[NodeId]:
    """Nodes reachable from ``v`` inside the fragment, including ``v``.

    Cross edges are followed one step onto virtual nodes, which are
    sinks here; what lies beyond them is another fragment's business.
    """
    if v not in f.members:
        raise UnknownNodeError(f"node {v!r} is not in fragment {f.id}")
    seen = {v}
    queue = deque([v])
    while queue:
        u = queue.popleft()
        for w in f.successors(u):
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return frozenset(seen)


def local_distances(f: Fragment, v: NodeId) -> dict[NodeId, int]:
    """Hop counts from ``v`` to every fragment member it reaches."""
    if v not in f.members:
        raise UnknownNodeError(f"node {v!r} is not in fragment {f.id}")
    dist = {v: 0}
    queue = deque([v])
    while queue:
        u = queue.popleft()
        for w in f.successors(u):
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist
