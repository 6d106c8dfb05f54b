"""Simulated multi-site runtime with per-message traffic accounting.

Every fragment lives on its own site, modeled as a worker that sees
nothing but its fragment and the byte messages delivered to it. The
coordinator is co-located with one site (fragment 0 unless configured):
messages between the coordinator and that site count as logical visits
but cost zero network bytes. Workers of one run execute concurrently;
results may not depend on their interleaving, which holds because the
local evaluators are pure and assembly orders responses by site.

Four executions are provided: the partial-evaluation run (one request
and one response per site, traffic a function of the boundary alone),
the ship-everything baseline, a message-passing traversal baseline that
revisits sites, and a map/reduce pipeline for regular queries.
"""

from __future__ import annotations

import random
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import wire
from .distance import BoundedQuery, collect_dist_equations, eval_dg_d, local_eval_d
from .graphs import (
    Fragment,
    Fragmentation,
    Graph,
    NodeId,
    fragment_document,
    parse_graph,
    random_partition,
    union_graphs,
)
from .oracle import INF, oracle_dist, oracle_reach, oracle_regular
from .reach import ReachQuery, collect_equations, eval_dg, local_eval
from .regular import RegularQuery, collect_vectors, eval_dg_r, local_eval_r
from .wire import Query

# message-passing traversal tags
_MSG_ACTIVATE = 0x10
_MSG_VIRTUAL = 0x11
_MSG_FOUND = 0x12
_MSG_IDLE = 0x13


@dataclass(frozen=True)
class SiteMap:
    """Fragment i runs on site i; one site also hosts the coordinator."""

    n_sites: int
    coordinator: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.coordinator < self.n_sites:
            raise ValueError(f"coordinator site must be in 0..{self.n_sites - 1}")


@dataclass
class SiteStats:
    site: int
    requests_received: int = 0
    responses_sent: int = 0
    request_bytes: int = 0
    response_bytes: int = 0
    messages_total: int = 0

    def as_dict(self) -> dict:
        return {
            "site": self.site,
            "requests_received": self.requests_received,
            "responses_sent": self.responses_sent,
            "request_bytes": self.request_bytes,
            "response_bytes": self.response_bytes,
            "messages_total": self.messages_total,
        }


@dataclass
class RunStats:
    per_site: list[SiteStats]
    phase_ms: dict[str, float] = field(default_factory=dict)
    ecc_bytes: int | None = None
    #: raw response payloads by site, kept for inspection, not serialized
    response_payloads: dict[int, bytes] = field(default_factory=dict, repr=False)

    def as_dict(self) -> dict:
        return {
            "per_site": [s.as_dict() for s in self.per_site],
            "phase_ms": {k: round(v, 3) for k, v in self.phase_ms.items()},
            "ecc_bytes": self.ecc_bytes,
        }

    def traffic_signature(self) -> tuple:
        """Everything deterministic about a run, timings excluded."""
        return (
            tuple((s.site, s.requests_received, s.responses_sent, s.request_bytes, s.response_bytes, s.messages_total) for s in self.per_site),
            tuple(sorted(self.response_payloads.items())),
            self.ecc_bytes,
        )


@dataclass
class RunResult:
    answer: bool
    distance: int | float | None
    stats: RunStats
    #: (site, node) activation log of the message-passing baseline
    status_log: tuple[tuple[int, NodeId], ...] | None = None


def _new_stats(n_sites: int) -> list[SiteStats]:
    return [SiteStats(site=i) for i in range(n_sites)]


class _SiteWorker:
    """Owns one fragment; communicates in bytes only."""

    def __init__(self, fragment: Fragment):
        self.fragment = fragment

    def handle(self, request: bytes) -> tuple[bytes, float]:
        t0 = time.perf_counter()
        q = wire.decode_request(request)
        f = self.fragment
        if isinstance(q, ReachQuery):
            payload = wire.encode_reach_response(f, q, local_eval(f, q))
        elif isinstance(q, BoundedQuery):
            payload = wire.encode_dist_response(f, q, local_eval_d(f, q))
        elif isinstance(q, RegularQuery):
            payload = wire.encode_regular_response(f, q, local_eval_r(f, q))
        else:  # pragma: no cover - decode_request rejects unknown kinds
            raise TypeError(f"unsupported query {q!r}")
        return payload, (time.perf_counter() - t0) * 1000.0


def _decode_response(frag: Fragmentation, fid: int, q: Query, payload: bytes):
    f = frag.fragments[fid]
    source_local = frag.fragment_of[q.source] == fid
    if isinstance(q, ReachQuery):
        return wire.decode_reach_response(payload, f.in_nodes, f.virtual_nodes, q, source_local)
    if isinstance(q, BoundedQuery):
        target_local = frag.fragment_of[q.target] == fid
        return wire.decode_dist_response(
            payload, f.in_nodes, f.virtual_nodes, q, source_local, target_local
        )
    return wire.decode_regular_response(payload, f.in_nodes, f.virtual_nodes, q, source_local)


def run_distributed(
    frag: Fragmentation,
    query: Query,
    algorithm: str = "pe",
    coordinator: int = 0,
    max_workers: int | None = None,
) -> RunResult:
    """Partial-evaluation run: every site is visited exactly once."""
    if algorithm != "pe":
        raise ValueError(f"unknown algorithm {algorithm!r}")
    frag.require(query.source)
    frag.require(query.target)
    sites = SiteMap(len(frag.fragments), coordinator)
    stats = _new_stats(sites.n_sites)
    workers = [_SiteWorker(f) for f in frag.fragments]

    t0 = time.perf_counter()
    request = wire.encode_request(query)
    for s in stats:
        s.requests_received += 1
        s.messages_total += 1
        if s.site != sites.coordinator:
            s.request_bytes += len(request)
    t_distribute = (time.perf_counter() - t0) * 1000.0

    with ThreadPoolExecutor(max_workers=max_workers or sites.n_sites) as pool:
        outcomes = list(pool.map(lambda w: w.handle(request), workers))
    payloads = {}
    local_ms = 0.0
    for i, (payload, ms) in enumerate(outcomes):
        payloads[i] = payload
        local_ms = max(local_ms, ms)
        stats[i].responses_sent += 1
        stats[i].messages_total += 1
        if i != sites.coordinator:
            stats[i].response_bytes += len(payload)

    t1 = time.perf_counter()
    decoded = {i: _decode_response(frag, i, query, payloads[i]) for i in sorted(payloads)}
    distance: int | float | None = None
    if isinstance(query, ReachQuery):
        answer = eval_dg(collect_equations(decoded), query.source)
    elif isinstance(query, BoundedQuery):
        answer, distance = eval_dg_d(collect_dist_equations(decoded), query)
    else:
        answer = eval_dg_r(collect_vectors(decoded), query)
    t_assemble = (time.perf_counter() - t1) * 1000.0

    run_stats = RunStats(
        per_site=stats,
        phase_ms={"distribute": t_distribute, "local_eval_max": local_ms, "assemble": t_assemble},
        response_payloads=payloads,
    )
    return RunResult(answer, distance, run_stats)


def ship_all(
    frag: Fragmentation,
    query: Query,
    coordinator: int = 0,
    max_workers: int | None = None,
) -> RunResult:
    """Baseline: every site ships its whole fragment to the coordinator."""
    frag.require(query.source)
    frag.require(query.target)
    sites = SiteMap(len(frag.fragments), coordinator)
    stats = _new_stats(sites.n_sites)

    t0 = time.perf_counter()
    request = wire.encode_request(query)
    for s in stats:
        s.requests_received += 1
        s.messages_total += 1
        if s.site != sites.coordinator:
            s.request_bytes += len(request)
    t_distribute = (time.perf_counter() - t0) * 1000.0

    def serialize(f: Fragment) -> tuple[bytes, float]:
        t = time.perf_counter()
        doc = fragment_document(f).encode("utf-8")
        return doc, (time.perf_counter() - t) * 1000.0

    with ThreadPoolExecutor(max_workers=max_workers or sites.n_sites) as pool:
        outcomes = list(pool.map(serialize, frag.fragments))
    payloads = {}
    local_ms = 0.0
    for i, (payload, ms) in enumerate(outcomes):
        payloads[i] = payload
        local_ms = max(local_ms, ms)
        stats[i].responses_sent += 1
        stats[i].messages_total += 1
        if i != sites.coordinator:
            stats[i].response_bytes += len(payload)

    t1 = time.perf_counter()
    g = union_graphs([parse_graph(payloads[i].decode("utf-8")) for i in sorted(payloads)])
    distance: int | float | None = None
    if isinstance(query, ReachQuery):
        answer = oracle_reach(g, query.source, query.target)
    elif isinstance(query, BoundedQuery):
        d = oracle_dist(g, query.source, query.target)
        answer = d <= query.bound
        distance = d if answer else INF
    else:
        answer = oracle_regular(g, query.source, query.target, query.automaton)
    t_assemble = (time.perf_counter() - t1) * 1000.0

    run_stats = RunStats(
        per_site=stats,
        phase_ms={"distribute": t_distribute, "local_eval_max": local_ms, "assemble": t_assemble},
        response_payloads=payloads,
    )
    return RunResult(answer, distance, run_stats)


class _TraversalWorker:
    """Holds per-node active flags; activation is one-way."""

    def __init__(self, site: int, fragment: Fragment, log: list[tuple[int, NodeId]]):
        self.site = site
        self.fragment = fragment
        self.active: set[NodeId] = set()
        self.log = log

    def _activate(self, v: NodeId) -> bool:
        if v in self.active:
            return False
        self.active.add(v)
        self.log.append((self.site, v))
        return True

    def _cascade(self, start: NodeId, q: ReachQuery) -> list[bytes]:
        if not self._activate(start):
            return []
        out: list[bytes] = []
        f = self.fragment
        if start == q.target:
            out.append(bytes([_MSG_FOUND]))
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w in f.successors(v):
                if not self._activate(w):
                    continue
                if w in f.local_nodes:
                    if w == q.target:
                        out.append(bytes([_MSG_FOUND]))
                    queue.append(w)
                else:
                    # virtual: somebody else's node, hand back to the master
                    out.append(bytes([_MSG_VIRTUAL]) + w.encode("utf-8"))
        return out

    def process(self, inbox: list[bytes], q: ReachQuery) -> list[bytes]:
        if not inbox:
            return [bytes([_MSG_IDLE])]
        out: list[bytes] = []
        for message in inbox:
            tag = message[0]
            if tag == wire.KIND_REACH:
                if q.source in self.fragment.local_nodes:
                    out.extend(self._cascade(q.source, q))
            elif tag == _MSG_ACTIVATE:
                node = message[1:].decode("utf-8")
                out.extend(self._cascade(node, q))
            else:
                raise wire.WireFormatError(f"unexpected worker message tag {tag}")
        return out


def msg_bfs(
    frag: Fragmentation,
    query: ReachQuery,
    coordinator: int = 0,
    sched_seed: int | None = None,
) -> RunResult:
    """Baseline traversal: activations hop between sites via the master.

    Deterministic round scheduler; a seed only permutes the in-round
    processing order. Node activation is monotone, so the answer does
    not depend on the order, only the traffic pattern may.
    """
    if not isinstance(query, ReachQuery):
        raise TypeError("the message-passing baseline answers plain reachability only")
    frag.require(query.source)
    frag.require(query.target)
    sites = SiteMap(len(frag.fragments), coordinator)
    stats = _new_stats(sites.n_sites)
    log: list[tuple[int, NodeId]] = []
    workers = [_TraversalWorker(i, f, log) for i, f in enumerate(frag.fragments)]
    rng = random.Random(sched_seed) if sched_seed is not None else None

    t0 = time.perf_counter()
    request = wire.encode_request(query)
    inboxes: dict[int, list[bytes]] = {i: [request] for i in range(sites.n_sites)}
    answer = False
    while True:
        order = list(range(sites.n_sites))
        if rng is not None:
            rng.shuffle(order)
        outgoing: dict[int, list[bytes]] = {}
        for i in order:
            inbox = inboxes.get(i, [])
            for message in inbox:
                stats[i].requests_received += 1
                stats[i].messages_total += 1
                if i != sites.coordinator:
                    stats[i].request_bytes += len(message)
            outgoing[i] = workers[i].process(inbox, query)
        inboxes = {}
        found = False
        idle_sites = 0
        redirects: list[tuple[int, bytes]] = []
        for i in order:
            for message in outgoing[i]:
                stats[i].responses_sent += 1
                stats[i].messages_total += 1
                if i != sites.coordinator:
                    stats[i].response_bytes += len(message)
                tag = message[0]
                if tag == _MSG_FOUND:
                    found = True
                elif tag == _MSG_IDLE:
                    idle_sites += 1
                elif tag == _MSG_VIRTUAL:
                    node = message[1:].decode("utf-8")
                    owner = frag.fragment_of[node]
                    redirects.append((owner, bytes([_MSG_ACTIVATE]) + node.encode("utf-8")))
                else:
                    raise wire.WireFormatError(f"unexpected master message tag {tag}")
        if found:
            answer = True
            break
        if idle_sites == sites.n_sites and not redirects:
            answer = False
            break
        for owner, message in redirects:
            inboxes.setdefault(owner, []).append(message)
    total_ms = (time.perf_counter() - t0) * 1000.0

    run_stats = RunStats(per_site=stats, phase_ms={"rounds": total_ms})
    return RunResult(answer, None, run_stats, status_log=tuple(log))


def mr_drpq(
    g: Graph,
    query: RegularQuery,
    k: int,
    seed: int = 0,
    max_workers: int | None = None,
) -> RunResult:
    """Map/reduce pipeline for regular queries.

    The coordinator partitions the graph and ships (fragment, query)
    pairs to k mappers; each mapper emits its vectors; one reducer
    assembles. ``ecc_bytes`` is the worst process path: bytes into a
    mapper plus the bytes that mapper feeds the reducer.
    """
    if not isinstance(query, RegularQuery):
        raise TypeError("the map/reduce pipeline answers regular queries only")
    t0 = time.perf_counter()
    frag = random_partition(g, k, seed)
    frag.require(query.source)
    frag.require(query.target)
    stats = _new_stats(len(frag.fragments))
    request = wire.encode_request(query)
    frame = wire.encode_uvarint(len(request)) + request
    inputs = {f.id: frame + wire.encode_fragment(f) for f in frag.fragments}
    for i, payload in inputs.items():
        stats[i].requests_received += 1
        stats[i].messages_total += 1
        stats[i].request_bytes += len(payload)
    t_distribute = (time.perf_counter() - t0) * 1000.0

    def mapper(payload: bytes) -> tuple[bytes, float]:
        t = time.perf_counter()
        r = wire.Reader(payload)
        q = wire.decode_request(r.raw(r.uvarint()))
        f = wire.decode_fragment(payload[r.pos :])
        assert isinstance(q, RegularQuery)
        out = wire.encode_regular_response(f, q, local_eval_r(f, q))
        return out, (time.perf_counter() - t) * 1000.0

    with ThreadPoolExecutor(max_workers=max_workers or len(frag.fragments)) as pool:
        outcomes = list(pool.map(mapper, [inputs[i] for i in sorted(inputs)]))
    payloads = {}
    local_ms = 0.0
    for i, (payload, ms) in enumerate(outcomes):
        payloads[i] = payload
        local_ms = max(local_ms, ms)
        stats[i].responses_sent += 1
        stats[i].messages_total += 1
        stats[i].response_bytes += len(payload)

    t1 = time.perf_counter()
    decoded = {i: _decode_response(frag, i, query, payloads[i]) for i in sorted(payloads)}
    answer = eval_dg_r(collect_vectors(decoded), query)
    t_assemble = (time.perf_counter() - t1) * 1000.0

    ecc = max(stats[i].request_bytes + stats[i].response_bytes for i in range(len(stats)))
    run_stats = RunStats(
        per_site=stats,
        phase_ms={"distribute": t_distribute, "local_eval_max": local_ms, "assemble": t_assemble},
        ecc_bytes=ecc,
        response_payloads=payloads,
    )
    return RunResult(answer, None, run_stats)
