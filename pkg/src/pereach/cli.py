"""Command line front end.

``pereach partition`` writes a random balanced partition file,
``pereach query`` answers one query and prints a JSON run report,
``pereach bench`` runs randomized agreement and traffic suites.

Query exit codes: 0 answer true, 1 answer false, 2 and up errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from .automaton import RegexParseError, build_query_automaton, parse_regex
from .distance import BoundedQuery, dis_dist
from .graphs import (
    GraphFormatError,
    PartitionError,
    UnknownNodeError,
    build_fragmentation,
    format_partition,
    parse_graph,
    parse_partition,
    random_partition,
)
from .oracle import INF, oracle_dist, oracle_reach, oracle_regular
from .reach import AssemblyError, ReachQuery, dis_reach
from .regular import RegularQuery, dis_rpq
from .runtime import RunResult, RunStats, mr_drpq, msg_bfs, run_distributed, ship_all
from .wire import WireFormatError
from .workloads import KINDS, boundary_ring, random_instances, ring_queries

ALGORITHMS = ("pe", "ship-all", "msg-bfs", "mr", "oracle")


def _load_graph(path: str):
    return parse_graph(Path(path).read_text(encoding="utf-8"))


def _fragmentation(args, g):
    if args.partition:
        if args.k is not None:
            raise ValueError("give either --partition or --k/--seed, not both")
        assignment = parse_partition(Path(args.partition).read_text(encoding="utf-8"))
        return build_fragmentation(g, assignment)
    if args.k is None:
        raise ValueError("need --partition or --k to place fragments")
    return random_partition(g, args.k, args.seed)


def _build_query(args):
    if args.bound is not None and args.kind != "bdreach":
        raise ValueError("--bound only applies to --kind bdreach")
    if args.pattern is not None and args.kind != "regreach":
        raise ValueError("--pattern only applies to --kind regreach")
    if args.kind == "reach":
        return ReachQuery(args.source, args.target)
    if args.kind == "bdreach":
        if args.bound is None:
            raise ValueError("--kind bdreach requires --bound")
        return BoundedQuery(args.source, args.target, args.bound)
    if args.pattern is None:
        raise ValueError("--kind regreach requires --pattern")
    return RegularQuery(args.source, args.target, build_query_automaton(parse_regex(args.pattern)))


def _sched_seed() -> int | None:
    raw = os.environ.get("PE_SCHED_SEED")
    return int(raw) if raw else None


def _report(result: RunResult) -> dict:
    distance = result.distance
    if distance is None or distance == INF:
        distance_json = None
    else:
        distance_json = int(distance)
    return {
        "answer": result.answer,
        "distance": distance_json,
        **result.stats.as_dict(),
    }


def cmd_partition(args) -> int:
    g = _load_graph(args.graph)
    frag = random_partition(g, args.k, args.seed)
    assignment = {v: i for v, i in frag.fragment_of.items()}
    Path(args.out).write_text(format_partition(assignment), encoding="utf-8")
    sizes = [len(f.local_nodes) for f in frag.fragments]
    print(f"wrote {args.out}: {len(g.nodes)} nodes into {args.k} fragments, sizes {sizes}")
    print(
        f"fragment graph: {len(frag.fragment_graph.nodes)} boundary nodes, "
        f"{len(frag.fragment_graph.edges)} cross edges"
    )
    return 0


def _run_oracle(g, query) -> RunResult:
    t0 = time.perf_counter()
    distance = None
    if isinstance(query, ReachQuery):
        answer = oracle_reach(g, query.source, query.target)
    elif isinstance(query, BoundedQuery):
        d = oracle_dist(g, query.source, query.target)
        answer = d <= query.bound
        distance = d if answer else INF
    else:
        answer = oracle_regular(g, query.source, query.target, query.automaton)
    ms = (time.perf_counter() - t0) * 1000.0
    return RunResult(answer, distance, RunStats(per_site=[], phase_ms={"oracle": ms}))


def cmd_query(args) -> int:
    g = _load_graph(args.graph)
    query = _build_query(args)
    algo = args.algorithm
    if algo == "oracle":
        result = _run_oracle(g, query)
    elif algo == "mr":
        if not isinstance(query, RegularQuery):
            raise ValueError("--algorithm mr answers --kind regreach only")
        result = mr_drpq(g, query, args.mappers, args.seed)
    else:
        frag = _fragmentation(args, g)
        if algo == "pe":
            result = run_distributed(frag, query, coordinator=args.coordinator)
        elif algo == "ship-all":
            result = ship_all(frag, query, coordinator=args.coordinator)
        else:
            if not isinstance(query, ReachQuery):
                raise ValueError("--algorithm msg-bfs answers --kind reach only")
            result = msg_bfs(frag, query, coordinator=args.coordinator, sched_seed=_sched_seed())
    report = _report(result)
    text = json.dumps(report, indent=2)
    print(text)
    if args.json:
        Path(args.json).write_text(text + "\n", encoding="utf-8")
    return 0 if result.answer else 1


def _bench_random(args) -> dict:
    instances = random_instances(
        args.seed, args.count, kinds=tuple(args.kinds.split(",")),
        max_nodes=args.nodes, max_edges=args.edges, max_k=args.k,
    )
    totals: dict[str, dict[str, float]] = {}
    agree = 0
    checks = 0

    def note(name: str, ms: float, bytes_: int = 0, visits: int = 0) -> None:
        row = totals.setdefault(name, {"runs": 0, "wall_ms": 0.0, "response_bytes": 0, "max_site_visits": 0})
        row["runs"] += 1
        row["wall_ms"] += ms
        row["response_bytes"] += bytes_
        row["max_site_visits"] = max(row["max_site_visits"], visits)

    for inst in instances:
        frag = random_partition(inst.graph, inst.k, inst.partition_seed)
        q = inst.query
        expected = _run_oracle(inst.graph, q)
        note("oracle", expected.stats.phase_ms["oracle"])

        runs: list[tuple[str, RunResult]] = []
        t0 = time.perf_counter()
        runs.append(("pe", run_distributed(frag, q)))
        pe_ms = (time.perf_counter() - t0) * 1000.0
        t0 = time.perf_counter()
        runs.append(("ship-all", ship_all(frag, q)))
        ship_ms = (time.perf_counter() - t0) * 1000.0
        extra_ms = {}
        if inst.kind == "reach":
            t0 = time.perf_counter()
            runs.append(("msg-bfs", msg_bfs(frag, q, sched_seed=_sched_seed())))
            extra_ms["msg-bfs"] = (time.perf_counter() - t0) * 1000.0
        if inst.kind == "regreach":
            t0 = time.perf_counter()
            runs.append(("mr", mr_drpq(inst.graph, q, inst.k, inst.partition_seed)))
            extra_ms["mr"] = (time.perf_counter() - t0) * 1000.0

        for name, result in runs:
            checks += 1
            if result.answer == expected.answer:
                agree += 1
            stats = result.stats
            ms = {"pe": pe_ms, "ship-all": ship_ms, **extra_ms}[name]
            note(
                name,
                ms,
                sum(s.response_bytes for s in stats.per_site),
                max((s.requests_received for s in stats.per_site), default=0),
            )

    return {
        "instances": len(instances),
        "agreement": {"checks": checks, "agree": agree, "rate": agree / checks if checks else 1.0},
        "algorithms": {
            name: {
                "runs": int(row["runs"]),
                "wall_ms": round(row["wall_ms"], 1),
                "response_bytes": int(row["response_bytes"]),
                "max_site_visits": int(row["max_site_visits"]),
            }
            for name, row in sorted(totals.items())
        },
    }


def _bench_scaling(args) -> list[dict]:
    rows = []
    for interior in (10, 100, 1000):
        g, assignment = boundary_ring(args.k, interior)
        frag = build_fragmentation(g, assignment)
        reach_q, _, _ = ring_queries(args.k)
        pe = run_distributed(frag, reach_q)
        ship = ship_all(frag, reach_q)
        rows.append(
            {
                "interior": interior,
                "pe_response_bytes": sum(s.response_bytes for s in pe.stats.per_site),
                "ship_all_response_bytes": sum(s.response_bytes for s in ship.stats.per_site),
            }
        )
    return rows


def cmd_bench(args) -> int:
    report = {"config": {"count": args.count, "nodes": args.nodes, "edges": args.edges, "k": args.k, "seed": args.seed, "kinds": args.kinds}}
    report.update(_bench_random(args))
    if args.scaling:
        report["scaling"] = _bench_scaling(args)
    text = json.dumps(report, indent=2)
    print(text)
    if args.json:
        Path(args.json).write_text(text + "\n", encoding="utf-8")
    return 0 if report["agreement"]["rate"] == 1.0 else 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pereach", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("partition", help="write a random balanced partition file")
    p.add_argument("--graph", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_partition)

    q = sub.add_parser("query", help="answer one query over a fragmented graph")
    q.add_argument("--graph", required=True)
    q.add_argument("--partition", help="partition file; alternative to --k/--seed")
    q.add_argument("--k", type=int, help="fragment count for a random partition")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--kind", choices=KINDS, required=True)
    q.add_argument("--from", dest="source", required=True, metavar="ID")
    q.add_argument("--to", dest="target", required=True, metavar="ID")
    q.add_argument("--bound", type=int, help="hop budget for --kind bdreach")
    q.add_argument("--pattern", help="path pattern for --kind regreach")
    q.add_argument("--algorithm", choices=ALGORITHMS, default="pe")
    q.add_argument("--coordinator", type=int, default=0, help="site co-located with the coordinator")
    q.add_argument("--mappers", type=int, default=3, help="mapper count for --algorithm mr")
    q.add_argument("--json", help="also write the JSON report to this path")
    q.set_defaults(func=cmd_query)

    b = sub.add_parser("bench", help="random agreement and traffic suites")
    b.add_argument("--count", type=int, default=100)
    b.add_argument("--nodes", type=int, default=200)
    b.add_argument("--edges", type=int, default=800)
    b.add_argument("--k", type=int, default=4)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--kinds", default=",".join(KINDS))
    b.add_argument("--scaling", action="store_true", help="add the fixed-boundary growth series")
    b.add_argument("--json", help="also write the JSON report to this path")
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (
        GraphFormatError,
        PartitionError,
        UnknownNodeError,
        RegexParseError,
        WireFormatError,
        AssemblyError,
        ValueError,
        TypeError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
