"""Exact distributed top-k queries over horizontally partitioned peers."""

from .arto import arto_top_k
from .config import DatasetConfig, ExperimentConfig, QuerySpec
from .coordinator import FetchBuffer, IterationTrace, QueryResult, adit_top_k, publish, relevant_peers
from .costsim import CostLedger, CostRow, comm_costs, query_answer_time, ratios, system_effort, trans_costs
from .harness import (
    brute_force_top_k,
    build_network,
    generate_dataset,
    generate_network,
    generate_query,
    load_csv,
    partition_data,
    run_benchmark,
    run_policy,
)
from .heuristics import (
    HeuristicPolicy,
    PeerQueryState,
    PolicyKind,
    basic_fetch_size,
    compute_weights,
    enhanced_fetch_size,
    fetch_size,
)
from .local import DbCostModel, LocalCursor, Network, PeerStore, estimate_db_cost, open_cursor
from .model import (
    Attribute,
    ObjectRecord,
    Query,
    Restriction,
    Schema,
    ScoredObject,
    score,
    similarity,
)
from .network import NetworkProfile, PeerProfile

__version__ = "0.1.0"
