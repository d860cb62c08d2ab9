"""Small random networks shared by the test modules."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from adit import DatasetConfig, ExperimentConfig, Network, Query, generate_query, score
from adit.harness import generate_dataset, generate_network, partition_data
from adit.local import DbCostModel

EXACTNESS_KS = (1, 5, 20, 150)
EXACTNESS_MS = (1, 4, 12)


@dataclass
class Instance:
    seed: int
    network: Network
    query: Query


def small_network(
    seed: int,
    peers: int,
    sizes: list[int],
    kind: str = "uniform",
    arity: int = 16,
) -> Network:
    """Network whose peer ``i`` stores exactly ``sizes[i]`` objects."""
    cfg = ExperimentConfig(
        seed=seed,
        peer_count=peers,
        dataset=DatasetConfig(
            kind=kind, arity=arity, numeric_fraction=0.3, domain_size_range=(2, 6)
        ),
    )
    profile = generate_network(cfg).with_sizes(dict(enumerate(sizes)))
    dataset = generate_dataset(cfg, sum(sizes))
    stores, profile = partition_data(dataset, profile, "sizeWeighted", seed)
    return Network(profile, stores, DbCostModel(*cfg.db_cost_constants))


def random_instance(seed: int, max_peers: int = 8, max_objects: int = 200) -> Instance:
    """One randomized exactness instance.

    Peer counts, store sizes (empty stores included), data family, k and
    the number of restrictions all vary with ``seed``.
    """
    rng = np.random.default_rng(seed)
    peers = int(rng.integers(1, max_peers + 1))
    sizes = rng.integers(0, max_objects + 1, size=peers).tolist()
    if rng.random() < 0.15:
        sizes[int(rng.integers(peers))] = 0
    kind = "census" if seed % 2 else "uniform"
    network = small_network(seed, peers, sizes, kind)
    k = int(rng.choice(EXACTNESS_KS))
    m = int(rng.choice(EXACTNESS_MS))
    return Instance(seed, network, generate_query(network, k, m, seed))


def scalar_top_scores(network: Network, query: Query) -> list[float]:
    """Independent oracle: scalar scoring of every record, best k scores."""
    scores = [
        score(rec, query)
        for pid in network.peer_ids
        for rec in network.stores[pid].all_records()
    ]
    return sorted(scores, reverse=True)[: query.k]
