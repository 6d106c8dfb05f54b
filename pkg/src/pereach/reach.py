"""Reachability by partial evaluation.

Each fragment reduces a reachability query to one Boolean equation per
in-node: "this node reaches the target" as a disjunction over the
fragment's virtual nodes, or the constant true when the target itself is
reached inside the fragment. The assembler never revisits a fragment; it
answers the query by plain reachability over the dependency graph of the
collected equations, with all constant-true variables merged into a
single node.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Hashable, Mapping
from dataclasses import dataclass, field

from .graphs import Fragment, Fragmentation, NodeId, descendants


class AssemblyError(ValueError):
    """Collected equations are inconsistent; signals a fragmentation bug."""


@dataclass(frozen=True)
class ReachQuery:
    source: NodeId
    target: NodeId


@dataclass(frozen=True)
class Formula:
    """Disjunction of variables, possibly absorbed to the constant true.

    The empty disjunction is false. ``is_true`` implies ``vars`` empty.
    """

    is_true: bool = False
    vars: frozenset = field(default_factory=frozenset)

    @property
    def is_false(self) -> bool:
        return not self.is_true and not self.vars

    @classmethod
    def of(cls, vars: frozenset | set) -> Formula:
        return cls(False, frozenset(vars))


TRUE = Formula(is_true=True)
FALSE = Formula()


@dataclass(frozen=True)
class BoolEquation:
    lhs: NodeId
    rhs: Formula


def local_eval(f: Fragment, q: ReachQuery) -> tuple[BoolEquation, ...]:
    """Equations for the fragment's in-nodes (plus the source if local).

    For an in-node v the right-hand side disjoins X_w for every virtual
    node w reachable from v; reaching the target anywhere in the
    fragment, local or virtual, absorbs the whole disjunction to true.
    Pure: depends only on the fragment and the query.
    """
    iset = set(f.in_nodes)
    if q.source in f.local_nodes:
        iset.add(q.source)
    equations = []
    for v in sorted(iset):
        des = descendants(f, v)
        if q.target in des:
            rhs = TRUE
        else:
            rhs = Formula.of({w for w in f.virtual_nodes if w in des})
        equations.append(BoolEquation(v, rhs))
    return tuple(equations)


class _TrueNode:
    __slots__ = ()

    def __repr__(self) -> str:
        return "<true>"


#: Merged stand-in for every equation whose right-hand side is true.
TRUE_NODE = _TrueNode()


@dataclass(frozen=True)
class BoolDepGraph:
    """Dependency graph of a Boolean equation system.

    One node per variable, except that variables defined as true are
    merged into ``TRUE_NODE``; an edge from a to b means X_b occurs in
    a's right-hand side. The least fixpoint assigns true exactly to the
    variables that reach ``TRUE_NODE``.
    """

    nodes: frozenset
    edges: Mapping[Hashable, tuple]
    labels: Mapping[Hashable, Formula]
    true_node: _TrueNode | None

    def reaches_true(self, start: Hashable) -> bool:
        if self.true_node is None:
            return False
        seen = {start}
        queue = deque([start])
        while queue:
            u = queue.popleft()
            if u is TRUE_NODE:
                return True
            for w in self.edges.get(u, ()):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return False


def collect_equations(per_fragment: Mapping[int, tuple[BoolEquation, ...]]) -> dict[NodeId, Formula]:
    """Union per-fragment equation sets into one definition map."""
    defs: dict[NodeId, Formula] = {}
    for i in sorted(per_fragment):
        for eq in per_fragment[i]:
            if eq.lhs in defs:
                raise AssemblyError(f"variable {eq.lhs!r} defined by two fragments")
            defs[eq.lhs] = eq.rhs
    return defs


def build_bool_dep_graph(defs: Mapping[NodeId, Formula]) -> BoolDepGraph:
    for lhs, rhs in defs.items():
        for w in rhs.vars:
            if w not in defs:
                raise AssemblyError(f"dangling variable {w!r} in equation for {lhs!r}")
    true_vars = {v for v, rhs in defs.items() if rhs.is_true}
    nodes: set = {v for v in defs if v not in true_vars}
    edges: dict = {}
    labels: dict = {v: defs[v] for v in nodes}
    if true_vars:
        nodes.add(TRUE_NODE)
        labels[TRUE_NODE] = TRUE
    for v in sorted(defs):
        if v in true_vars:
            continue
        targets = {TRUE_NODE if w in true_vars else w for w in defs[v].vars}
        edges[v] = tuple(sorted(targets, key=lambda x: (x is TRUE_NODE, str(x))))
    return BoolDepGraph(
        nodes=frozenset(nodes),
        edges=edges,
        labels=labels,
        true_node=TRUE_NODE if true_vars else None,
    )


def eval_dg(defs: Mapping[NodeId, Formula], source: NodeId) -> bool:
    """Assemble: true iff the source's variable reaches the true node."""
    if source not in defs:
        raise AssemblyError(f"no equation for source {source!r}")
    dg = build_bool_dep_graph(defs)
    start = TRUE_NODE if defs[source].is_true else source
    return dg.reaches_true(start)


def dis_reach(frag: Fragmentation, q: ReachQuery) -> bool:
    """Distributed reachability: one visit per fragment, then assembly."""
    frag.require(q.source)
    frag.require(q.target)
    per_fragment = {f.id: local_eval(f, q) for f in frag.fragments}
    return eval_dg(collect_equations(per_fragment), q.source)
