"""Distributed graph queries by partial evaluation.

Reachability, bounded reachability and regular path queries over
fragmented directed labeled graphs. Each fragment is visited exactly
once per query and the traffic between sites depends on the boundary
structure alone, never on fragment interiors. A simulated multi-site
runtime measures both guarantees, next to shipping, message-passing and
map/reduce baselines.
"""

from .automaton import (
    Atom,
    Concat,
    Epsilon,
    QueryAutomaton,
    RegexParseError,
    Star,
    Union,
    Wildcard,
    accepts,
    build_query_automaton,
    format_regex,
    parse_regex,
)
from .distance import INF, BoundedQuery, DistEquation, dis_dist, eval_dg_d, local_eval_d
from .graphs import (
    Fragment,
    Fragmentation,
    FragmentGraph,
    Graph,
    GraphFormatError,
    PartitionError,
    UnknownNodeError,
    build_fragmentation,
    descendants,
    format_graph,
    format_partition,
    local_distances,
    parse_graph,
    parse_partition,
    random_partition,
)
from .oracle import OracleResult, kleene_solve, oracle_dist, oracle_eval, oracle_reach, oracle_regular
from .reach import (
    AssemblyError,
    BoolEquation,
    Formula,
    ReachQuery,
    dis_reach,
    eval_dg,
    local_eval,
)
from .regular import MatchVector, RegularQuery, dis_rpq, eval_dg_r, local_eval_r, product_fixpoint
from .runtime import RunResult, RunStats, SiteStats, mr_drpq, msg_bfs, run_distributed, ship_all

__all__ = [
    "Atom",
    "Concat",
    "Epsilon",
    "QueryAutomaton",
    "RegexParseError",
    "Star",
    "Union",
    "Wildcard",
    "accepts",
    "build_query_automaton",
    "format_regex",
    "parse_regex",
    "INF",
    "BoundedQuery",
    "DistEquation",
    "dis_dist",
    "eval_dg_d",
    "local_eval_d",
    "Fragment",
    "Fragmentation",
    "FragmentGraph",
    "Graph",
    "GraphFormatError",
    "PartitionError",
    "UnknownNodeError",
    "build_fragmentation",
    "descendants",
    "format_graph",
    "format_partition",
    "local_distances",
    "parse_graph",
    "parse_partition",
    "random_partition",
    "OracleResult",
    "kleene_solve",
    "oracle_dist",
    "oracle_eval",
    "oracle_reach",
    "oracle_regular",
    "AssemblyError",
    "BoolEquation",
    "Formula",
    "ReachQuery",
    "dis_reach",
    "eval_dg",
    "local_eval",
    "MatchVector",
    "RegularQuery",
    "dis_rpq",
    "eval_dg_r",
    "local_eval_r",
    "product_fixpoint",
    "RunResult",
    "RunStats",
    "SiteStats",
    "mr_drpq",
    "msg_bfs",
    "run_distributed",
    "ship_all",
]
