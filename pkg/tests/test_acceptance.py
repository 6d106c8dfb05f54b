"""Guarantee suite: ten checks, one printed PASS/FAIL line each.

A shared randomized corpus of 1,000 instances feeds the agreement,
visit-count, traffic-formula, subsumption, baseline, and map/reduce
checks; the remaining checks use the bundled fixture, paired growth
graphs, random equation systems, and an exhaustive pattern sweep.
"""

import itertools
import random
import time
from collections import Counter

import pytest

from pereach import (
    INF,
    BoundedQuery,
    Formula,
    ReachQuery,
    RegularQuery,
    Star,
    Wildcard,
    accepts,
    build_fragmentation,
    build_query_automaton,
    dis_dist,
    dis_reach,
    dis_rpq,
    eval_dg,
    format_regex,
    kleene_solve,
    local_eval,
    local_eval_d,
    local_eval_r,
    mr_drpq,
    msg_bfs,
    oracle_dist,
    oracle_reach,
    oracle_regular,
    parse_regex,
    random_partition,
    run_distributed,
    ship_all,
)
from pereach.wire import candidate_set, equation_owners
from pereach.workloads import boundary_ring, random_instances, ring_queries
from reference import (
    automaton_words,
    dist_response_size,
    exact_size_asts,
    lang_words,
    min_boundary_crossings,
    reach_response_size,
    regular_response_size,
)

CORPUS_SEED = 7
CORPUS_COUNT = 1000


def _verdict(capsys, index: int, name: str, ok: bool, detail: str = "") -> None:
    tail = f" ({detail})" if detail else ""
    with capsys.disabled():
        print(f"\n[{index:2d}/10] {name}: {'PASS' if ok else 'FAIL'}{tail}")


class Corpus:
    """Violation ledger filled by one pass over the random instances."""

    def __init__(self):
        self.count = 0
        self.elapsed_s = 0.0
        self.kinds = Counter()
        self.agreement: list[str] = []
        self.visits: list[str] = []
        self.traffic: list[str] = []
        self.traffic_checks = 0
        self.subsumption: list[str] = []
        self.baseline: list[str] = []
        self.mapreduce: list[str] = []
        self.msg_runs = 0
        self.mr_runs = 0
        self.crossing_cases = 0


def _check_response_sizes(c: Corpus, tag: str, frag, q, pe) -> None:
    """Every payload must weigh exactly what the boundary predicts."""
    for f in frag.fragments:
        payload = pe.stats.response_payloads[f.id]
        owners = equation_owners(f.in_nodes, q, q.source in f.local_nodes)
        indices = list(range(len(owners)))
        if isinstance(q, ReachQuery):
            expected = reach_response_size(f.id, indices, len(f.virtual_nodes))
        elif isinstance(q, RegularQuery):
            expected = regular_response_size(
                f.id, indices, len(f.virtual_nodes), len(q.automaton.states)
            )
        else:
            oset = candidate_set(f.virtual_nodes, q, q.target in f.local_nodes)
            opos = {w: i for i, w in enumerate(oset)}
            own = {v: i for i, v in enumerate(owners)}
            shaped = [
                (own[eq.lhs], [(opos[w], d) for w, d in eq.terms])
                for eq in local_eval_d(f, q)
            ]
            expected = dist_response_size(f.id, len(oset), shaped)
        c.traffic_checks += 1
        if len(payload) != expected:
            c.traffic.append(f"{tag} fragment {f.id}: {len(payload)} != {expected}")
        logged = pe.stats.per_site[f.id].response_bytes
        want = 0 if f.id == 0 else len(payload)
        if logged != want:
            c.traffic.append(f"{tag} fragment {f.id}: logged {logged} != {want}")


@pytest.fixture(scope="module")
def corpus() -> Corpus:
    c = Corpus()
    wstar = build_query_automaton(Star(Wildcard()))
    t0 = time.perf_counter()
    for idx, inst in enumerate(random_instances(CORPUS_SEED, CORPUS_COUNT)):
        tag = f"#{idx}:{inst.kind}"
        g, q = inst.graph, inst.query
        frag = random_partition(g, inst.k, inst.partition_seed)
        pe = run_distributed(frag, q)
        ship = ship_all(frag, q)

        d = None
        if inst.kind == "reach":
            expected = oracle_reach(g, q.source, q.target)
            if dis_reach(frag, q) is not expected:
                c.agreement.append(f"{tag} dis_reach")
            msg = msg_bfs(frag, q)
            c.msg_runs += 1
            if msg.answer is not expected:
                c.agreement.append(f"{tag} msg_bfs")
            if len(msg.status_log) != len(set(msg.status_log)):
                c.baseline.append(f"{tag} repeated activation")
            if expected:
                crossings = min_boundary_crossings(g, frag, q.source, q.target)
                if crossings is not None and crossings >= 2:
                    c.crossing_cases += 1
                    if max(s.requests_received for s in msg.stats.per_site) <= 1:
                        c.baseline.append(f"{tag} single visits, {crossings} crossings")
        elif inst.kind == "bdreach":
            d = oracle_dist(g, q.source, q.target)
            expected = d <= q.bound
            answer, distance = dis_dist(frag, q)
            if answer is not expected:
                c.agreement.append(f"{tag} dis_dist answer")
            elif expected and distance != d:
                c.agreement.append(f"{tag} dis_dist distance {distance} != {d}")
            elif not expected and distance != INF:
                c.agreement.append(f"{tag} miss must report an infinite distance")
        else:
            expected = oracle_regular(g, q.source, q.target, q.automaton)
            direct = dis_rpq(frag, q)
            if direct is not expected:
                c.agreement.append(f"{tag} dis_rpq")
            mr = mr_drpq(g, q, inst.k, inst.partition_seed)
            c.mr_runs += 1
            if mr.answer is not direct:
                c.mapreduce.append(f"{tag} map/reduce answer differs")
            if mr.answer is not expected:
                c.agreement.append(f"{tag} mr_drpq")
            recomputed = max(
                s.request_bytes + s.response_bytes for s in mr.stats.per_site
            )
            if mr.stats.ecc_bytes != recomputed:
                c.mapreduce.append(
                    f"{tag} ecc {mr.stats.ecc_bytes} != recomputed {recomputed}"
                )

        if pe.answer is not expected:
            c.agreement.append(f"{tag} distributed run")
        if inst.kind == "bdreach" and expected and pe.distance != d:
            c.agreement.append(f"{tag} distributed run distance")
        if ship.answer is not expected:
            c.agreement.append(f"{tag} ship_all")

        for s in pe.stats.per_site:
            if s.requests_received != 1 or s.responses_sent != 1:
                c.visits.append(
                    f"{tag} site {s.site}: {s.requests_received} requests,"
                    f" {s.responses_sent} responses"
                )

        _check_response_sizes(c, tag, frag, q, pe)

        wq = RegularQuery(q.source, q.target, wstar)
        if dis_rpq(frag, wq) is not dis_reach(frag, ReachQuery(q.source, q.target)):
            c.subsumption.append(tag)

        c.kinds[inst.kind] += 1
        c.count += 1
    c.elapsed_s = time.perf_counter() - t0
    return c


def test_01_fixture_tables_and_answers(recnet_frag, dbhr, capsys):
    ok = False
    t0 = time.perf_counter()
    try:
        q = ReachQuery("Ann", "Mark")
        tables = {
            f.id: {eq.lhs: eq.rhs for eq in local_eval(f, q)}
            for f in recnet_frag.fragments
        }
        assert tables[0] == {
            "Ann": Formula.of({"Mat", "Pat"}),
            "Fred": Formula.of({"Emmy"}),
        }
        assert tables[1] == {
            "Emmy": Formula.of({"Fred", "Ross"}),
            "Jack": Formula.of({"Fred"}),
            "Mat": Formula.of({"Fred"}),
        }
        assert tables[2] == {"Pat": Formula.of({"Jack"}), "Ross": Formula(True)}

        bq = BoundedQuery("Ann", "Mark", 6)
        middle = recnet_frag.fragments[1]
        assert {eq.lhs: dict(eq.terms) for eq in local_eval_d(middle, bq)} == {
            "Emmy": {"Fred": 3, "Ross": 1},
            "Jack": {"Fred": 3},
            "Mat": {"Fred": 1},
        }

        rq = RegularQuery("Ann", "Mark", dbhr)
        false = Formula.of(frozenset())
        vectors = {v.owner: v.entries for v in local_eval_r(middle, rq)}
        assert vectors == {
            "Emmy": {0: false, 1: false, 2: false, 3: Formula.of({("Ross", 3)})},
            "Jack": {0: false, 1: false, 2: false, 3: false},
            "Mat": {0: false, 1: false, 2: false, 3: Formula.of({("Fred", 3)})},
        }

        assert dis_reach(recnet_frag, q) is True
        assert dis_dist(recnet_frag, bq) == (True, 6)
        assert dis_rpq(recnet_frag, rq) is True
        elapsed = time.perf_counter() - t0
        assert elapsed < 1.0
        ok = True
    finally:
        _verdict(
            capsys, 1, "fixture equation/vector tables and query answers", ok,
            f"{(time.perf_counter() - t0) * 1000:.0f} ms",
        )


def test_02_randomized_oracle_agreement(corpus, capsys):
    ok = False
    try:
        assert corpus.count == CORPUS_COUNT
        assert all(corpus.kinds[k] >= 300 for k in ("reach", "bdreach", "regreach"))
        assert not corpus.agreement, corpus.agreement[:5]
        assert corpus.elapsed_s < 60.0
        ok = True
    finally:
        _verdict(
            capsys, 2, "all executions agree with the oracle", ok,
            f"{corpus.count} instances, {len(corpus.agreement)} disagreements,"
            f" {corpus.elapsed_s:.1f} s",
        )


def test_03_single_visit_per_site(corpus, capsys):
    ok = False
    try:
        assert corpus.count == CORPUS_COUNT
        assert not corpus.visits, corpus.visits[:5]
        ok = True
    finally:
        _verdict(
            capsys, 3, "one request and one response per site on every run", ok,
            f"{len(corpus.visits)} violations",
        )


def test_04_traffic_blind_to_interior_size(capsys):
    ok = False
    detail = ""
    try:
        k = 3
        runs = {}
        ship_bytes = {}
        for interior in (100, 1000):
            g, assignment = boundary_ring(k, interior)
            frag = build_fragmentation(g, assignment)
            queries = ring_queries(k)
            runs[interior] = [run_distributed(frag, q) for q in queries]
            assert all(r.answer for r in runs[interior])
            ship = ship_all(frag, queries[0])
            ship_bytes[interior] = sum(
                s.response_bytes for s in ship.stats.per_site
            )
        for small, big in zip(runs[100], runs[1000]):
            assert small.stats.response_payloads == big.stats.response_payloads
            assert [s.response_bytes for s in small.stats.per_site] == [
                s.response_bytes for s in big.stats.per_site
            ]
        growth = ship_bytes[1000] / ship_bytes[100]
        assert growth >= 5.0
        detail = (
            "payloads byte-identical at 100 vs 1000 interior nodes;"
            f" ship-all grows {growth:.1f}x"
        )
        ok = True
    finally:
        _verdict(capsys, 4, "response traffic ignores interior growth", ok, detail)


def test_05_response_bytes_match_closed_form(corpus, capsys):
    ok = False
    try:
        assert corpus.traffic_checks > 2000
        assert not corpus.traffic, corpus.traffic[:5]
        ok = True
    finally:
        _verdict(
            capsys, 5, "payload sizes equal the closed-form wire formulas", ok,
            f"{corpus.traffic_checks} payloads checked,"
            f" {len(corpus.traffic)} mismatches",
        )


def _random_equation_system(rng: random.Random) -> dict[str, Formula]:
    n = rng.randint(3, 12)
    names = [f"x{i}" for i in range(n)]
    defs = {
        v: Formula.of({w for w in names if rng.random() < 0.2}) for v in names
    }
    true_count = min(rng.choice((0, 0, 0, 1, 2)), n - 2)
    constants = rng.sample(names, true_count)
    cycle = rng.sample([v for v in names if v not in constants], 2)
    defs[cycle[0]] = Formula.of(defs[cycle[0]].vars | {cycle[1]})
    defs[cycle[1]] = Formula.of(defs[cycle[1]].vars | {cycle[0]})
    for v in constants:
        defs[v] = Formula(True)
    return defs


def test_06_cyclic_equation_systems_least_fixpoint(capsys):
    ok = False
    mismatches = 0
    spurious = 0
    try:
        rng = random.Random(6)
        for _ in range(200):
            defs = _random_equation_system(rng)
            solved = kleene_solve(defs)
            for v in defs:
                if eval_dg(defs, v) is not solved[v]:
                    mismatches += 1
            if not any(f.is_true for f in defs.values()) and any(solved.values()):
                spurious += 1
        assert mismatches == 0
        assert spurious == 0
        ok = True
    finally:
        _verdict(
            capsys, 6, "dependency-graph assembly is the least fixpoint", ok,
            f"200 cyclic systems, {mismatches} mismatches,"
            f" {spurious} spurious positives",
        )


def test_07_automaton_language_exhaustive(capsys):
    ok = False
    detail = ""
    alphabet = ("a", "b", "c")
    try:
        counts = []
        bad: list[str] = []
        cache: dict[tuple, frozenset] = {}
        rng = random.Random(77)
        spot_checked = 0
        for size in range(1, 7):
            asts = exact_size_asts(size, alphabet)
            counts.append(len(asts))
            for ast in asts:
                a = build_query_automaton(ast)
                key = (a.states, a.transitions, tuple(sorted(a.state_label.items())))
                accepted = cache.get(key)
                if accepted is None:
                    accepted = automaton_words(a, alphabet, 6)
                    cache[key] = accepted
                if accepted != lang_words(ast, alphabet, 6):
                    bad.append(format_regex(ast))
            # direct accepts() sweep over every word for sampled patterns
            for ast in rng.sample(asts, min(20, len(asts))):
                a = build_query_automaton(ast)
                language = lang_words(ast, alphabet, 6)
                for n in range(7):
                    for word in itertools.product(alphabet, repeat=n):
                        spot_checked += 1
                        if accepts(a, word) is not (word in language):
                            bad.append(f"{format_regex(ast)} on {word!r}")
        assert counts == [5, 5, 55, 155, 1305, 5505]
        assert not bad, bad[:5]

        dbhr = build_query_automaton(parse_regex("DB* | HR*"))
        assert dbhr.states == (0, 1, 2, 3)
        assert dbhr.state_label == {2: "DB", 3: "HR"}
        assert dbhr.transitions == frozenset(
            {(0, 2), (2, 2), (2, 1), (0, 3), (3, 3), (3, 1), (0, 1)}
        )
        detail = (
            f"{sum(counts)} patterns x 1093 words, {len(bad)} mismatches,"
            f" {spot_checked} direct accepts() calls"
        )
        ok = True
    finally:
        _verdict(capsys, 7, "pattern language matches on every word up to length 6", ok, detail)


def test_08_wildcard_star_subsumes_plain_reachability(corpus, capsys):
    ok = False
    try:
        assert corpus.count == CORPUS_COUNT
        assert not corpus.subsumption, corpus.subsumption[:5]
        ok = True
    finally:
        _verdict(
            capsys, 8, "wildcard-star queries equal plain reachability", ok,
            f"{corpus.count} instances, {len(corpus.subsumption)} violations",
        )


def test_09_traversal_baseline_revisits_and_monotonicity(corpus, capsys):
    ok = False
    try:
        assert corpus.msg_runs >= 300
        assert corpus.crossing_cases >= 20, "too few multi-crossing cases to be meaningful"
        assert not corpus.baseline, corpus.baseline[:5]
        ok = True
    finally:
        _verdict(
            capsys, 9, "traversal baseline revisits sites and stays monotone", ok,
            f"{corpus.msg_runs} runs, {corpus.crossing_cases} multi-crossing cases,"
            f" {len(corpus.baseline)} violations",
        )


def test_10_mapreduce_agreement_and_ecc(corpus, capsys):
    ok = False
    try:
        assert corpus.mr_runs >= 300
        assert not corpus.mapreduce, corpus.mapreduce[:5]
        ok = True
    finally:
        _verdict(
            capsys, 10, "map/reduce agrees and reports the worst process path", ok,
            f"{corpus.mr_runs} runs, {len(corpus.mapreduce)} violations",
        )
