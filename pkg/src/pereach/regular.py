"""Regular path queries by partial evaluation.

Each fragment answers "which automaton runs can continue from here" for
every in-node: a vector with one Boolean formula per automaton state,
whose variables name (virtual node, state) pairs. The formulas are the
least fixpoint of reachability over the fragment's product graph (node,
state), computed by a monotone bitmask propagation so cycles converge.
Assembly is reachability over the dependency graph of all vectors.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Mapping
from dataclasses import dataclass

from .automaton import FINAL, START, QueryAutomaton, StateId
from .graphs import Fragment, Fragmentation, NodeId
from .reach import FALSE, TRUE, AssemblyError, Formula


@dataclass(frozen=True)
class RegularQuery:
    source: NodeId
    target: NodeId
    automaton: QueryAutomaton


@dataclass(frozen=True)
class MatchVector:
    """Per-state formulas for one in-node.

    ``entries[u]`` says whether some path from the owner, with the owner
    already matched at state u, can finish the automaton at the target;
    variables are (virtual node, state) pairs resolved elsewhere.
    """

    owner: NodeId
    entries: Mapping[StateId, Formula]


def _state_matches(q: RegularQuery, a: QueryAutomaton, v: NodeId, label: str, u: StateId) -> bool:
    # start and final are matched by identity with the query endpoints
    if u == a.start:
        return v == q.source
    if u == a.final:
        return v == q.target
    expected = a.state_label[u]
    return expected is None or expected == label


def product_fixpoint(f: Fragment, q: RegularQuery) -> dict[tuple[NodeId, StateId], Formula]:
    """Formulas for every matching (local node, state) pair.

    Boundary pairs seed the propagation: (target, final) with true,
    every other matching virtual pair with its own variable. Masks only
    grow, so the worklist settles on the least fixpoint even on cycles.
    """
    a = q.automaton
    n_states = len(a.states)
    state_index = {u: i for i, u in enumerate(a.states)}
    o_index = {w: i for i, w in enumerate(f.virtual_nodes)}
    true_bit = 1 << (len(f.virtual_nodes) * n_states)

    def matching_states(v: NodeId) -> set[StateId]:
        return {u for u in a.states if _state_matches(q, a, v, f.labels[v], u)}

    states_of = {v: matching_states(v) for v in f.members}

    seeds: dict[tuple[NodeId, StateId], int] = {}
    for v in f.members:
        for u in states_of[v]:
            if v == q.target and u == a.final:
                seeds[(v, u)] = true_bit
            elif v in o_index:
                seeds[(v, u)] = 1 << (o_index[v] * n_states + state_index[u])
    # empty word: the zero-length path from the source is already at the target
    if q.source == q.target and q.source in f.local_nodes and (START, FINAL) in a.transitions:
        seeds[(q.source, a.start)] = seeds.get((q.source, a.start), 0) | true_bit

    reverse: dict[tuple[NodeId, StateId], list[tuple[NodeId, StateId]]] = {}
    for v in sorted(f.local_nodes):
        for w in f.successors(v):
            for u in sorted(states_of[v]):
                for u2 in a.successor_states(u):
                    if u2 in states_of[w]:
                        reverse.setdefault((w, u2), []).append((v, u))

    masks: dict[tuple[NodeId, StateId], int] = dict(seeds)
    work = deque(sorted(seeds))
    while work:
        pair = work.popleft()
        m = masks[pair]
        for pred in reverse.get(pair, ()):
            merged = masks.get(pred, 0) | m
            if merged != masks.get(pred, 0):
                masks[pred] = merged
                work.append(pred)

    out: dict[tuple[NodeId, StateId], Formula] = {}
    for v in sorted(f.local_nodes):
        for u in sorted(states_of[v]):
            m = masks.get((v, u), 0)
            if m & true_bit:
                out[(v, u)] = TRUE
            elif m:
                vars = {
                    (f.virtual_nodes[b // n_states], a.states[b % n_states])
                    for b in range(m.bit_length())
                    if m >> b & 1
                }
                out[(v, u)] = Formula.of(vars)
            else:
                out[(v, u)] = FALSE
    return out


def local_eval_r(f: Fragment, q: RegularQuery) -> tuple[MatchVector, ...]:
    """Vectors for the fragment's in-nodes (plus the source if local)."""
    fix = product_fixpoint(f, q)
    iset = set(f.in_nodes)
    if q.source in f.local_nodes:
        iset.add(q.source)
    vectors = []
    for v in sorted(iset):
        entries = {u: fix.get((v, u), FALSE) for u in q.automaton.states}
        vectors.append(MatchVector(v, entries))
    return tuple(vectors)


def collect_vectors(per_fragment: Mapping[int, tuple[MatchVector, ...]]) -> dict[NodeId, MatchVector]:
    rvset: dict[NodeId, MatchVector] = {}
    for i in sorted(per_fragment):
        for vec in per_fragment[i]:
            if vec.owner in rvset:
                raise AssemblyError(f"vector for {vec.owner!r} defined by two fragments")
            rvset[vec.owner] = vec
    return rvset


@dataclass(frozen=True)
class RegDepGraph:
    """Dependency graph over (node, state) pairs."""

    nodes: frozenset[tuple[NodeId, StateId]]
    edges: Mapping[tuple[NodeId, StateId], tuple[tuple[NodeId, StateId], ...]]
    true_pairs: frozenset[tuple[NodeId, StateId]]


def build_reg_dep_graph(rvset: Mapping[NodeId, MatchVector]) -> RegDepGraph:
    nodes: set[tuple[NodeId, StateId]] = set()
    edges: dict[tuple[NodeId, StateId], tuple[tuple[NodeId, StateId], ...]] = {}
    true_pairs: set[tuple[NodeId, StateId]] = set()
    for v, vec in rvset.items():
        for u, formula in vec.entries.items():
            pair = (v, u)
            nodes.add(pair)
            if formula.is_true:
                true_pairs.add(pair)
                continue
            for w, u2 in formula.vars:
                if w not in rvset:
                    raise AssemblyError(f"dangling vector variable ({w!r}, {u2})")
            edges[pair] = tuple(sorted(formula.vars))
            nodes.update(formula.vars)
    return RegDepGraph(frozenset(nodes), edges, frozenset(true_pairs))


def eval_dg_r(rvset: Mapping[NodeId, MatchVector], q: RegularQuery) -> bool:
    """Assemble: true iff (source, start) equals or reaches a true pair."""
    if q.source not in rvset:
        raise AssemblyError(f"no vector for source {q.source!r}")
    dg = build_reg_dep_graph(rvset)
    start = (q.source, q.automaton.start)
    seen = {start}
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        if pair in dg.true_pairs:
            return True
        for nxt in dg.edges.get(pair, ()):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return False


def dis_rpq(frag: Fragmentation, q: RegularQuery) -> bool:
    """Distributed regular path query: one visit per fragment."""
    frag.require(q.source)
    frag.require(q.target)
    per_fragment = {f.id: local_eval_r(f, q) for f in frag.fragments}
    return eval_dg_r(collect_vectors(per_fragment), q)
