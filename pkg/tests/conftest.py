"""Shared fixtures: the recommendation-network fixture graph, its
three-site placement, and the DB*/HR* query automaton."""

from pathlib import Path

import pytest

from pereach import (
    Fragmentation,
    Graph,
    build_fragmentation,
    build_query_automaton,
    parse_graph,
    parse_partition,
    parse_regex,
)

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(scope="session")
def recnet() -> Graph:
    return parse_graph((DATA / "recnet.graph").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def recnet_assignment(recnet) -> dict[str, int]:
    return parse_partition((DATA / "recnet.parts").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def recnet_frag(recnet, recnet_assignment) -> Fragmentation:
    return build_fragmentation(recnet, recnet_assignment)


@pytest.fixture(scope="session")
def dbhr():
    """Automaton for ``DB* | HR*``: start 0, final 1, DB 2, HR 3."""
    return build_query_automaton(parse_regex("DB* | HR*"))
