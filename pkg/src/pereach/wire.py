"""Binary message formats exchanged between coordinator and sites.

All traffic numbers reported by the runtime are byte lengths of these
encodings, so the layouts are part of the contract and every list is
written in a canonical order.

Integers are unsigned LEB128 varints, strings are varint length plus
UTF-8 bytes, bit i of a bitmap sits in byte i // 8 at bit i % 8.

Request (any query kind)::

    kind byte (0 reach, 1 bounded, 2 regular) | source | target
    | bound varint                 (bounded only)
    | automaton                    (regular only):
        n_states varint,
        per interior state: wildcard flag byte + label unless wildcard,
        n_transitions varint, per transition: from varint + to varint

Reach response: header ``fragment id | n_equations | n_virtual``, then
per equation (in sorted left-hand-side order) the left-hand side as an
index into the sorted equation owners, one constant-true flag byte, and
a bitmap over the fragment's virtual nodes marking the disjuncts.

Bounded response: header ``fragment id | n_equations | n_oset``, then
per equation the owner index, a term count, and per term an index into
the sorted candidate set (virtual nodes plus the target when local) and
a weight varint.

Regular response: header ``fragment id | n_vectors | n_states |
n_virtual``, then per vector the owner index and, per automaton state,
one constant-true flag byte plus a bitmap over (virtual node, state)
pairs at bit ``virtual_index * n_states + state_index``.

A fragment payload (baseline shipping and the map stage) carries the
fragment id, labeled local and virtual nodes, in-node list and both edge
lists, everything sorted.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

from .automaton import QueryAutomaton
from .distance import BoundedQuery, DistEquation
from .graphs import Fragment, NodeId
from .reach import BoolEquation, Formula, ReachQuery
from .regular import MatchVector, RegularQuery

Query = ReachQuery | BoundedQuery | RegularQuery

KIND_REACH = 0
KIND_BOUNDED = 1
KIND_REGULAR = 2


class WireFormatError(ValueError):
    """A message does not decode under the documented layout."""


def encode_uvarint(n: int) -> bytes:
    if n < 0:
        raise ValueError("varints are unsigned")
    out = bytearray()
    while True:
        byte = n & 0x7F
        n >>= 7
        if n:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return bytes(out)


class Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def uvarint(self) -> int:
        shift = 0
        value = 0
        while True:
            if self.pos >= len(self.data):
                raise WireFormatError("truncated varint")
            byte = self.data[self.pos]
            self.pos += 1
            value |= (byte & 0x7F) << shift
            if not byte & 0x80:
                return value
            shift += 7

    def raw(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise WireFormatError("truncated message")
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def string(self) -> str:
        return self.raw(self.uvarint()).decode("utf-8")

    def done(self) -> None:
        if self.pos != len(self.data):
            raise WireFormatError(f"{len(self.data) - self.pos} trailing bytes")


def _string(s: str) -> bytes:
    raw = s.encode("utf-8")
    return encode_uvarint(len(raw)) + raw


def _pack_bits(indices: Iterable[int], n_bits: int) -> bytes:
    out = bytearray((n_bits + 7) // 8)
    for i in indices:
        out[i // 8] |= 1 << (i % 8)
    return bytes(out)


def _unpack_bits(raw: bytes, n_bits: int) -> list[int]:
    return [i for i in range(n_bits) if raw[i // 8] >> (i % 8) & 1]


def _encode_automaton(a: QueryAutomaton) -> bytes:
    parts = [encode_uvarint(len(a.states))]
    for u in a.states[2:]:
        lbl = a.state_label[u]
        if lbl is None:
            parts.append(b"\x01")
        else:
            parts.append(b"\x00" + _string(lbl))
    transitions = sorted(a.transitions)
    parts.append(encode_uvarint(len(transitions)))
    for p, v in transitions:
        parts.append(encode_uvarint(p) + encode_uvarint(v))
    return b"".join(parts)


def _decode_automaton(r: Reader) -> QueryAutomaton:
    n_states = r.uvarint()
    if n_states < 2:
        raise WireFormatError("automaton needs start and final states")
    state_label: dict[int, str | None] = {}
    for u in range(2, n_states):
        flag = r.raw(1)[0]
        state_label[u] = None if flag else r.string()
    transitions = set()
    for _ in range(r.uvarint()):
        transitions.add((r.uvarint(), r.uvarint()))
    return QueryAutomaton(tuple(range(n_states)), frozenset(transitions), state_label)


def encode_request(q: Query) -> bytes:
    head = _string(q.source) + _string(q.target)
    if isinstance(q, ReachQuery):
        return bytes([KIND_REACH]) + head
    if isinstance(q, BoundedQuery):
        return bytes([KIND_BOUNDED]) + head + encode_uvarint(q.bound)
    if isinstance(q, RegularQuery):
        return bytes([KIND_REGULAR]) + head + _encode_automaton(q.automaton)
    raise TypeError(f"not a query: {q!r}")


def decode_request(data: bytes) -> Query:
    r = Reader(data)
    kind = r.raw(1)[0]
    source = r.string()
    target = r.string()
    if kind == KIND_REACH:
        q: Query = ReachQuery(source, target)
    elif kind == KIND_BOUNDED:
        q = BoundedQuery(source, target, r.uvarint())
    elif kind == KIND_REGULAR:
        q = RegularQuery(source, target, _decode_automaton(r))
    else:
        raise WireFormatError(f"unknown query kind {kind}")
    r.done()
    return q


def _owner_index(owners: Sequence[NodeId]) -> dict[NodeId, int]:
    return {v: i for i, v in enumerate(owners)}


def equation_owners(in_nodes: Sequence[NodeId], q: Query, source_local: bool) -> list[NodeId]:
    """The sorted left-hand sides a fragment emits for a query."""
    owners = set(in_nodes)
    if source_local:
        owners.add(q.source)
    return sorted(owners)


def candidate_set(virtual_nodes: Sequence[NodeId], q: Query, target_local: bool) -> list[NodeId]:
    """Sorted min-plus candidates: virtual nodes plus a local target."""
    oset = set(virtual_nodes)
    if target_local:
        oset.add(q.target)
    return sorted(oset)


def encode_reach_response(f: Fragment, q: ReachQuery, equations: Sequence[BoolEquation]) -> bytes:
    owners = equation_owners(f.in_nodes, q, q.source in f.local_nodes)
    index = _owner_index(owners)
    v_index = _owner_index(f.virtual_nodes)
    n_virtual = len(f.virtual_nodes)
    parts = [encode_uvarint(f.id), encode_uvarint(len(equations)), encode_uvarint(n_virtual)]
    for eq in sorted(equations, key=lambda e: e.lhs):
        parts.append(encode_uvarint(index[eq.lhs]))
        parts.append(b"\x01" if eq.rhs.is_true else b"\x00")
        parts.append(_pack_bits((v_index[w] for w in eq.rhs.vars), n_virtual))
    return b"".join(parts)


def decode_reach_response(
    data: bytes,
    in_nodes: Sequence[NodeId],
    virtual_nodes: Sequence[NodeId],
    q: ReachQuery,
    source_local: bool,
) -> tuple[BoolEquation, ...]:
    owners = equation_owners(in_nodes, q, source_local)
    r = Reader(data)
    r.uvarint()  # fragment id, already implied by the channel
    n_eq = r.uvarint()
    n_virtual = r.uvarint()
    if n_virtual != len(virtual_nodes):
        raise WireFormatError("virtual node count mismatch")
    equations = []
    for _ in range(n_eq):
        lhs = owners[r.uvarint()]
        is_true = bool(r.raw(1)[0])
        bits = _unpack_bits(r.raw((n_virtual + 7) // 8), n_virtual)
        rhs = Formula(True) if is_true else Formula.of({virtual_nodes[i] for i in bits})
        equations.append(BoolEquation(lhs, rhs))
    r.done()
    return tuple(equations)


def encode_dist_response(f: Fragment, q: BoundedQuery, equations: Sequence[DistEquation]) -> bytes:
    owners = equation_owners(f.in_nodes, q, q.source in f.local_nodes)
    index = _owner_index(owners)
    oset = candidate_set(f.virtual_nodes, q, q.target in f.local_nodes)
    o_index = _owner_index(oset)
    parts = [encode_uvarint(f.id), encode_uvarint(len(equations)), encode_uvarint(len(oset))]
    for eq in sorted(equations, key=lambda e: e.lhs):
        parts.append(encode_uvarint(index[eq.lhs]))
        parts.append(encode_uvarint(len(eq.terms)))
        for w, weight in sorted(eq.terms):
            parts.append(encode_uvarint(o_index[w]) + encode_uvarint(weight))
    return b"".join(parts)


def decode_dist_response(
    data: bytes,
    in_nodes: Sequence[NodeId],
    virtual_nodes: Sequence[NodeId],
    q: BoundedQuery,
    source_local: bool,
    target_local: bool,
) -> tuple[DistEquation, ...]:
    owners = equation_owners(in_nodes, q, source_local)
    oset = candidate_set(virtual_nodes, q, target_local)
    r = Reader(data)
    r.uvarint()
    n_eq = r.uvarint()
    if r.uvarint() != len(oset):
        raise WireFormatError("candidate set size mismatch")
    equations = []
    for _ in range(n_eq):
        lhs = owners[r.uvarint()]
        terms = tuple((oset[r.uvarint()], r.uvarint()) for _ in range(r.uvarint()))
        equations.append(DistEquation(lhs, terms))
    r.done()
    return tuple(equations)


def encode_regular_response(f: Fragment, q: RegularQuery, vectors: Sequence[MatchVector]) -> bytes:
    a = q.automaton
    owners = equation_owners(f.in_nodes, q, q.source in f.local_nodes)
    index = _owner_index(owners)
    v_index = _owner_index(f.virtual_nodes)
    state_index = {u: i for i, u in enumerate(a.states)}
    n_states = len(a.states)
    n_bits = len(f.virtual_nodes) * n_states
    parts = [
        encode_uvarint(f.id),
        encode_uvarint(len(vectors)),
        encode_uvarint(n_states),
        encode_uvarint(len(f.virtual_nodes)),
    ]
    for vec in sorted(vectors, key=lambda v: v.owner):
        parts.append(encode_uvarint(index[vec.owner]))
        for u in a.states:
            formula = vec.entries[u]
            parts.append(b"\x01" if formula.is_true else b"\x00")
            bits = (v_index[w] * n_states + state_index[u2] for w, u2 in formula.vars)
            parts.append(_pack_bits(bits, n_bits))
    return b"".join(parts)


def decode_regular_response(
    data: bytes,
    in_nodes: Sequence[NodeId],
    virtual_nodes: Sequence[NodeId],
    q: RegularQuery,
    source_local: bool,
) -> tuple[MatchVector, ...]:
    a = q.automaton
    owners = equation_owners(in_nodes, q, source_local)
    n_states = len(a.states)
    n_bits = len(virtual_nodes) * n_states
    r = Reader(data)
    r.uvarint()
    n_vec = r.uvarint()
    if r.uvarint() != n_states:
        raise WireFormatError("state count mismatch")
    if r.uvarint() != len(virtual_nodes):
        raise WireFormatError("virtual node count mismatch")
    vectors = []
    for _ in range(n_vec):
        owner = owners[r.uvarint()]
        entries = {}
        for u in a.states:
            is_true = bool(r.raw(1)[0])
            bits = _unpack_bits(r.raw((n_bits + 7) // 8), n_bits)
            if is_true:
                entries[u] = Formula(True)
            else:
                entries[u] = Formula.of(
                    {(virtual_nodes[i // n_states], a.states[i % n_states]) for i in bits}
                )
        vectors.append(MatchVector(owner, entries))
    r.done()
    return tuple(vectors)


def encode_fragment(f: Fragment) -> bytes:
    parts = [encode_uvarint(f.id), encode_uvarint(len(f.local_nodes))]
    for v in sorted(f.local_nodes):
        parts.append(_string(v) + _string(f.labels[v]))
    parts.append(encode_uvarint(len(f.virtual_nodes)))
    for w in f.virtual_nodes:
        parts.append(_string(w) + _string(f.labels[w]))
    parts.append(encode_uvarint(len(f.in_nodes)))
    for v in f.in_nodes:
        parts.append(_string(v))
    local = sorted((u, w) for u, ws in f.local_edges.items() for w in ws)
    parts.append(encode_uvarint(len(local)))
    for u, w in local:
        parts.append(_string(u) + _string(w))
    parts.append(encode_uvarint(len(f.cross_edges)))
    for u, w in f.cross_edges:
        parts.append(_string(u) + _string(w))
    return b"".join(parts)


def decode_fragment(data: bytes) -> Fragment:
    r = Reader(data)
    fid = r.uvarint()
    labels: dict[NodeId, str] = {}
    local = []
    for _ in range(r.uvarint()):
        v = r.string()
        labels[v] = r.string()
        local.append(v)
    virtual = []
    for _ in range(r.uvarint()):
        w = r.string()
        labels[w] = r.string()
        virtual.append(w)
    in_nodes = tuple(r.string() for _ in range(r.uvarint()))
    local_edges: dict[NodeId, list[NodeId]] = {v: [] for v in local}
    for _ in range(r.uvarint()):
        u = r.string()
        w = r.string()
        local_edges[u].append(w)
    cross = tuple((r.string(), r.string()) for _ in range(r.uvarint()))
    r.done()
    return Fragment(
        id=fid,
        local_nodes=frozenset(local),
        virtual_nodes=tuple(virtual),
        in_nodes=in_nodes,
        local_edges={v: tuple(ws) for v, ws in local_edges.items()},
        cross_edges=cross,
        labels=labels,
    )
