"""Simulated multi-site executions: traffic accounting and agreement."""

import pytest

from pereach import (
    BoundedQuery,
    ReachQuery,
    RegularQuery,
    UnknownNodeError,
    build_fragmentation,
    mr_drpq,
    msg_bfs,
    run_distributed,
    ship_all,
)
from pereach.graphs import fragment_document
from pereach.reach import local_eval
from pereach.regular import local_eval_r
from pereach.runtime import SiteMap
from pereach.wire import (
    decode_reach_response,
    decode_regular_response,
    encode_request,
)

RQ = ReachQuery("Ann", "Mark")
BQ = BoundedQuery("Ann", "Mark", 6)


@pytest.fixture()
def qreg(dbhr):
    return RegularQuery("Ann", "Mark", dbhr)


class TestPartialEvaluationRun:
    def test_fixture_answers(self, recnet_frag, qreg):
        reach = run_distributed(recnet_frag, RQ)
        assert (reach.answer, reach.distance) == (True, None)
        dist = run_distributed(recnet_frag, BQ)
        assert (dist.answer, dist.distance) == (True, 6)
        reg = run_distributed(recnet_frag, qreg)
        assert (reg.answer, reg.distance) == (True, None)

    def test_every_site_visited_exactly_once(self, recnet_frag, qreg):
        for q in (RQ, BQ, qreg):
            result = run_distributed(recnet_frag, q)
            for s in result.stats.per_site:
                assert s.requests_received == 1
                assert s.responses_sent == 1
                assert s.messages_total == 2

    def test_fixture_traffic_golden(self, recnet_frag):
        result = run_distributed(recnet_frag, RQ)
        rows = [
            (s.site, s.request_bytes, s.response_bytes) for s in result.stats.per_site
        ]
        assert rows == [(0, 0, 0), (1, 10, 12), (2, 10, 9)]
        assert len(encode_request(RQ)) == 10

    def test_coordinator_site_pays_no_bytes(self, recnet_frag, qreg):
        for coord in range(3):
            result = run_distributed(recnet_frag, qreg, coordinator=coord)
            for s in result.stats.per_site:
                if s.site == coord:
                    assert s.request_bytes == 0
                    assert s.response_bytes == 0
                else:
                    assert s.request_bytes == len(encode_request(qreg))
                    assert s.response_bytes > 0

    def test_one_response_per_remote_site(self, recnet_frag, qreg):
        result = run_distributed(recnet_frag, qreg)
        nonzero = [s.site for s in result.stats.per_site if s.response_bytes > 0]
        assert nonzero == [1, 2]

    def test_moving_the_coordinator_keeps_the_answer(self, recnet_frag, qreg):
        runs = [run_distributed(recnet_frag, qreg, coordinator=c) for c in range(3)]
        assert {r.answer for r in runs} == {True}

    def test_payloads_decode_to_local_evaluations(self, recnet_frag, qreg):
        result = run_distributed(recnet_frag, qreg)
        for f in recnet_frag.fragments:
            decoded = decode_regular_response(
                result.stats.response_payloads[f.id],
                f.in_nodes,
                f.virtual_nodes,
                qreg,
                "Ann" in f.local_nodes,
            )
            assert decoded == local_eval_r(f, qreg)

    def test_deterministic_traffic(self, recnet_frag, qreg):
        a = run_distributed(recnet_frag, qreg)
        b = run_distributed(recnet_frag, qreg)
        serial = run_distributed(recnet_frag, qreg, max_workers=1)
        assert a.stats.traffic_signature() == b.stats.traffic_signature()
        assert a.stats.traffic_signature() == serial.stats.traffic_signature()

    def test_phase_timings_present(self, recnet_frag):
        stats = run_distributed(recnet_frag, RQ).stats
        assert set(stats.phase_ms) == {"distribute", "local_eval_max", "assemble"}
        assert all(v >= 0 for v in stats.phase_ms.values())

    def test_rejects_unknown_algorithm(self, recnet_frag):
        with pytest.raises(ValueError):
            run_distributed(recnet_frag, RQ, algorithm="teleport")

    def test_rejects_unknown_endpoints(self, recnet_frag):
        with pytest.raises(UnknownNodeError):
            run_distributed(recnet_frag, ReachQuery("Ann", "ghost"))

    def test_rejects_coordinator_out_of_range(self, recnet_frag):
        with pytest.raises(ValueError):
            run_distributed(recnet_frag, RQ, coordinator=3)

    def test_as_dict_shape(self, recnet_frag):
        d = run_distributed(recnet_frag, RQ).stats.as_dict()
        assert set(d) == {"per_site", "phase_ms", "ecc_bytes"}
        assert d["ecc_bytes"] is None
        assert [s["site"] for s in d["per_site"]] == [0, 1, 2]


class TestSiteMap:
    def test_coordinator_range(self):
        SiteMap(3, 2)
        with pytest.raises(ValueError):
            SiteMap(3, 3)
        with pytest.raises(ValueError):
            SiteMap(3, -1)


class TestShipAll:
    def test_fixture_agreement(self, recnet_frag, qreg):
        for q in (RQ, BQ, qreg):
            assert ship_all(recnet_frag, q).answer is run_distributed(recnet_frag, q).answer
        assert ship_all(recnet_frag, BQ).distance == 6

    def test_response_bytes_are_whole_fragments(self, recnet_frag):
        result = ship_all(recnet_frag, RQ)
        for f in recnet_frag.fragments:
            expected = 0 if f.id == 0 else len(fragment_document(f).encode("utf-8"))
            assert result.stats.per_site[f.id].response_bytes == expected

    def test_single_fragment_ships_nothing(self, recnet):
        frag = build_fragmentation(recnet, {v: 0 for v in recnet.nodes})
        result = ship_all(frag, RQ)
        assert result.answer is True
        assert sum(s.response_bytes for s in result.stats.per_site) == 0


class TestMessagePassingBaseline:
    def test_fixture_answer_and_revisits(self, recnet_frag):
        result = msg_bfs(recnet_frag, RQ)
        assert result.answer is True
        visits = [s.requests_received for s in result.stats.per_site]
        assert visits == [2, 4, 3]
        assert max(visits) > 1  # unlike the partial-evaluation run

    def test_negative_answer_after_idle_round(self, recnet_frag):
        result = msg_bfs(recnet_frag, ReachQuery("Deb", "Ann"))
        assert result.answer is False
        assert result.status_log == ((2, "Deb"),)
        assert [s.requests_received for s in result.stats.per_site] == [1, 1, 1]

    def test_activation_is_monotone(self, recnet_frag):
        log = msg_bfs(recnet_frag, RQ).status_log
        assert len(log) == len(set(log))

    def test_source_activates_on_its_own_site(self, recnet_frag):
        log = msg_bfs(recnet_frag, RQ).status_log
        assert log[0] == (0, "Ann")

    def test_scheduler_seed_keeps_answers(self, recnet_frag):
        for seed in (None, 0, 7, 99):
            result = msg_bfs(recnet_frag, RQ, sched_seed=seed)
            assert result.answer is True
            assert len(result.status_log) == len(set(result.status_log))

    def test_rejects_other_query_kinds(self, recnet_frag):
        with pytest.raises(TypeError):
            msg_bfs(recnet_frag, BQ)

    def test_coordinator_site_pays_no_bytes(self, recnet_frag):
        result = msg_bfs(recnet_frag, RQ, coordinator=1)
        assert result.stats.per_site[1].request_bytes == 0
        assert result.stats.per_site[1].response_bytes == 0


class TestMapReducePipeline:
    def test_fixture_partition_reproduces_local_results(self, recnet, recnet_frag, qreg):
        # seed 231818 places nodes exactly like the fixture partition file
        result = mr_drpq(recnet, qreg, 3, seed=231818)
        assert result.answer is True
        for f in recnet_frag.fragments:
            decoded = decode_regular_response(
                result.stats.response_payloads[f.id],
                f.in_nodes,
                f.virtual_nodes,
                qreg,
                "Ann" in f.local_nodes,
            )
            assert decoded == local_eval_r(f, qreg)

    def test_ecc_is_worst_mapper_path(self, recnet, qreg):
        for seed in (0, 1, 231818):
            stats = mr_drpq(recnet, qreg, 3, seed=seed).stats
            assert stats.ecc_bytes == max(
                s.request_bytes + s.response_bytes for s in stats.per_site
            )

    def test_every_mapper_pays_for_its_fragment(self, recnet, qreg):
        stats = mr_drpq(recnet, qreg, 3, seed=231818).stats
        for s in stats.per_site:
            assert s.request_bytes > len(encode_request(qreg))
            assert s.response_bytes > 0
            assert s.requests_received == 1
            assert s.responses_sent == 1

    def test_single_mapper(self, recnet, qreg):
        result = mr_drpq(recnet, qreg, 1)
        assert result.answer is True
        assert result.stats.ecc_bytes > 0

    def test_rejects_other_query_kinds(self, recnet):
        with pytest.raises(TypeError):
            mr_drpq(recnet, RQ, 3)

    def test_agreement_with_partial_evaluation(self, recnet, recnet_frag, dbhr):
        for s, t in [("Ann", "Mark"), ("Mark", "Ann"), ("Deb", "Deb"), ("Fred", "Mark")]:
            q = RegularQuery(s, t, dbhr)
            assert mr_drpq(recnet, q, 3, seed=5).answer is run_distributed(recnet_frag, q).answer


class TestAgreementAcrossExecutions:
    def test_reach_after_decoding_matches_direct_evaluation(self, recnet_frag):
        result = run_distributed(recnet_frag, RQ)
        for f in recnet_frag.fragments:
            decoded = decode_reach_response(
                result.stats.response_payloads[f.id],
                f.in_nodes,
                f.virtual_nodes,
                RQ,
                "Ann" in f.local_nodes,
            )
            assert decoded == local_eval(f, RQ)

    @pytest.mark.parametrize(
        ("source", "target", "expected"),
        [("Ann", "Mark", True), ("Mark", "Ann", False), ("Deb", "Deb", True)],
    )
    def test_all_executions_agree(self, recnet_frag, source, target, expected):
        q = ReachQuery(source, target)
        assert run_distributed(recnet_frag, q).answer is expected
        assert ship_all(recnet_frag, q).answer is expected
        assert msg_bfs(recnet_frag, q).answer is expected
