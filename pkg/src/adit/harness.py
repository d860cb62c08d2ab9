"""Experiment generation and execution.

Synthetic networks and datasets, CSV ingestion, partitioning, the
brute-force oracle and the policy sweep that produces the ratio tables.
Every random draw comes from a :class:`numpy.random.SeedSequence` derived
from the config seed, so a config always reproduces the same CSV bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .arto import arto_top_k
from .config import ExperimentConfig
from .coordinator import QueryResult, adit_top_k
from .costsim import ratios
from .heuristics import HeuristicPolicy, PolicyKind
from .local import DbCostModel, Network, PeerStore
from .model import (
    CATEGORICAL,
    NUMERIC,
    AditError,
    Attribute,
    Query,
    Restriction,
    Schema,
    SchemaError,
    ScoredObject,
)
from .network import ConfigError, NetworkProfile, PeerProfile

CSV_COLUMNS = (
    "seed",
    "peers",
    "k",
    "restrictions",
    "policy",
    "iterations",
    "messages",
    "objects_moved",
    "se_seconds",
    "qat_seconds",
    "ratio_se",
    "ratio_qat",
    "short_result",
)

# stream tags for SeedSequence spawning
_NETWORK, _DATA, _PARTITION, _QUERY = 1, 2, 3, 4


class CsvFormatError(AditError, ValueError):
    pass


class OracleMismatch(AditError):
    def __init__(self, cells: list[str]):
        self.cells = cells
        super().__init__("oracle mismatch in " + "; ".join(cells))


class CellError(AditError):
    """A benchmark cell failed; the message names the cell."""


def _rng(seed: int, *tags: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, *tags]))


# -- networks -----------------------------------------------------------------


def generate_network(config: ExperimentConfig, seed: int | None = None, peers: int | None = None) -> NetworkProfile:
    """Heterogeneous peer profiles drawn from the configured ranges.

    Transmission rates are drawn log-uniformly so that slow links are as
    common as fast ones on a multiplicative scale.
    """
    seed = config.seed if seed is None else seed
    n = config.peer_counts[0] if peers is None else peers
    if n < 1:
        raise ConfigError("peer count must be >= 1")
    rng = _rng(seed, _NETWORK, n)
    lo, hi = config.per_peer_size_range
    sizes = rng.integers(lo, hi + 1, size=n)
    speeds = rng.uniform(*config.speed_range, size=n)
    rates = np.exp(rng.uniform(np.log(config.trans_rate_range[0]), np.log(config.trans_rate_range[1]), size=n))
    msg = rng.uniform(*config.msg_cost_range, size=n)
    profiles = [
        PeerProfile(
            peer_id=i,
            objects_stored=int(sizes[i]),
            speed=float(min(max(speeds[i], 1.0), 10.0)),
            trans_rate_mbit=float(rates[i]),
            msg_cost_seconds=float(msg[i]),
            object_size_bytes=config.object_size_bytes,
        )
        for i in range(n)
    ]
    return NetworkProfile.of(profiles)


# -- datasets -----------------------------------------------------------------


def synthetic_schema(name: str, domain_sizes: Sequence[int], kinds: Sequence[str]) -> Schema:
    """Attributes ``a0..``; ``kinds`` entries are categorical, ordinal or numeric."""
    attrs = []
    for j, (d, kind) in enumerate(zip(domain_sizes, kinds)):
        if kind == "ordinal":
            attrs.append(Attribute(f"a{j}", NUMERIC, low=0.0, high=float(d - 1)))
        elif kind == NUMERIC:
            attrs.append(Attribute(f"a{j}", NUMERIC, low=0.0, high=100.0))
        else:
            attrs.append(Attribute(f"a{j}", CATEGORICAL, tuple(f"v{c}" for c in range(d))))
    return Schema(name, tuple(attrs))


def generate_dataset(config: ExperimentConfig, n_objects: int, seed: int | None = None, peers: int = 0) -> PeerStore:
    """Synthetic relation with ``n_objects`` rows and ids ``0..n-1``.

    The result is a column store with peer id -1; use
    :meth:`PeerStore.all_records` for a list of :class:`ObjectRecord`.
    """
    ds = config.dataset
    if ds.kind == "csv":
        schema = schema_from_dicts(ds.schema) if ds.schema else None
        return load_csv(ds.path, schema)
    seed = config.seed if seed is None else seed
    rng = _rng(seed, _DATA, peers)
    lo, hi = ds.domain_size_range
    domain_sizes = rng.integers(lo, hi + 1, size=ds.arity).tolist()
    if ds.kind == "census":
        kinds = np.where(rng.random(ds.arity) < ds.ordinal_fraction, "ordinal", CATEGORICAL)
    else:
        kinds = np.where(rng.random(ds.arity) < ds.numeric_fraction, NUMERIC, CATEGORICAL)
    schema = synthetic_schema(ds.kind, domain_sizes, kinds.tolist())
    columns = []
    for d, kind in zip(domain_sizes, kinds.tolist()):
        if kind == NUMERIC:
            columns.append(np.round(rng.uniform(0.0, 100.0, size=n_objects), 2))
        elif ds.kind == "census":
            # skewed frequencies, most mass on a few codes
            p = rng.dirichlet(np.full(d, 0.5))
            columns.append(rng.choice(d, size=n_objects, p=p).astype(np.int16))
        else:
            columns.append(rng.integers(0, d, size=n_objects).astype(np.int16))
    return PeerStore(-1, schema, np.arange(n_objects, dtype=np.int64), columns)


def schema_from_dicts(items: Iterable[dict], name: str = "relation") -> Schema:
    attrs = []
    for item in items:
        kind = item.get("kind", CATEGORICAL)
        if kind == NUMERIC:
            attrs.append(Attribute(item["name"], NUMERIC, low=float(item["low"]), high=float(item["high"])))
        else:
            attrs.append(Attribute(item["name"], CATEGORICAL, tuple(item["domain"])))
    return Schema(name, tuple(attrs))


_ID_HEADERS = ("objectid", "object_id", "id")


def load_csv(path: str | Path, schema: Schema | None = None) -> PeerStore:
    """Read a dataset CSV.

    The header names the attributes; an optional leading ``objectId``
    column carries ids, otherwise ids are assigned ``0..n-1``. Without a
    schema, a column is numeric when every value parses as a float (range
    taken from the data) and categorical otherwise.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CsvFormatError(f"cannot read {path}: {exc}") from None
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        return PeerStore.empty(-1, schema or Schema(path.stem, ()))
    has_ids = bool(header) and header[0].strip().lower() in _ID_HEADERS
    names = [h.strip() for h in (header[1:] if has_ids else header)]
    rows: list[list[str]] = []
    ids: list[int] = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise CsvFormatError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        if has_ids:
            try:
                ids.append(int(row[0]))
            except ValueError:
                raise CsvFormatError(f"{path}:{lineno}: bad object id {row[0]!r}") from None
            row = row[1:]
        rows.append([c.strip() for c in row])
    if not has_ids:
        ids = list(range(len(rows)))
    if len(set(ids)) != len(ids):
        raise CsvFormatError(f"{path}: duplicate object ids")

    if schema is None:
        schema = _infer_schema(path.stem, names, rows)
    elif [a.name for a in schema.attributes] != names:
        raise SchemaError(f"{path}: header {names} does not match schema attributes")

    columns = []
    for j, attr in enumerate(schema.attributes):
        if attr.is_numeric:
            col = np.empty(len(rows), dtype=np.float64)
            for i, row in enumerate(rows):
                try:
                    v = float(row[j])
                except ValueError:
                    raise CsvFormatError(
                        f"{path}:{i + 2}: attribute {attr.name!r} expects a number, got {row[j]!r}"
                    ) from None
                if not math.isfinite(v):
                    raise CsvFormatError(f"{path}:{i + 2}: attribute {attr.name!r} is not finite")
                col[i] = v
        else:
            lookup = {tok: c for c, tok in enumerate(attr.domain)}
            col = np.empty(len(rows), dtype=np.int32)
            for i, row in enumerate(rows):
                try:
                    col[i] = lookup[row[j]]
                except KeyError:
                    raise CsvFormatError(
                        f"{path}:{i + 2}: unknown token {row[j]!r} for attribute {attr.name!r}"
                    ) from None
        columns.append(col)
    return PeerStore(-1, schema, np.array(ids, dtype=np.int64), columns)


def _infer_schema(name: str, names: list[str], rows: list[list[str]]) -> Schema:
    attrs = []
    for j, attr_name in enumerate(names):
        values = [r[j] for r in rows]
        try:
            nums = [float(v) for v in values]
            ok = all(math.isfinite(x) for x in nums) and bool(nums)
        except ValueError:
            ok = False
        if ok:
            attrs.append(Attribute(attr_name, NUMERIC, low=min(nums), high=max(nums)))
        else:
            attrs.append(Attribute(attr_name, CATEGORICAL, tuple(sorted(set(values)))))
    return Schema(name, tuple(attrs))


# -- partitioning -------------------------------------------------------------


def _proportional_counts(total: int, targets: Sequence[int]) -> list[int]:
    """Largest-remainder apportionment of ``total`` by ``targets``."""
    weight = sum(targets)
    if weight == 0:
        targets = [1] * len(targets)
        weight = len(targets)
    exact = [total * t / weight for t in targets]
    counts = [int(math.floor(x)) for x in exact]
    short = total - sum(counts)
    order = sorted(range(len(targets)), key=lambda i: (-(exact[i] - counts[i]), i))
    for i in order[:short]:
        counts[i] += 1
    return counts


def partition_data(
    dataset: PeerStore,
    network: NetworkProfile,
    strategy: str = "sizeWeighted",
    seed: int = 0,
) -> tuple[dict[int, PeerStore], NetworkProfile]:
    """Split ``dataset`` into disjoint per-peer stores.

    Returns the stores and a copy of ``network`` whose ``objects_stored``
    are the actual store sizes.
    """
    pids = [p.peer_id for p in network.peers]
    n = len(dataset)
    if strategy == "roundRobin":
        assignment = [np.arange(i, n, len(pids)) for i in range(len(pids))]
    elif strategy in ("sizeWeighted", "shuffled"):
        rows = np.arange(n)
        if strategy == "shuffled":
            rows = _rng(seed, _PARTITION, len(pids)).permutation(n)
        counts = _proportional_counts(n, [p.objects_stored for p in network.peers])
        bounds = np.cumsum([0, *counts])
        assignment = [np.sort(rows[bounds[i] : bounds[i + 1]]) for i in range(len(pids))]
    else:
        raise ConfigError(f"unknown partition strategy {strategy!r}")
    stores = {pid: dataset.take(rows, peer_id=pid) for pid, rows in zip(pids, assignment)}
    return stores, network.with_sizes({pid: len(s) for pid, s in stores.items()})


def build_network(config: ExperimentConfig, peers: int | None = None) -> Network:
    """Profiles, data and partition for one network size of ``config``."""
    n = config.peer_counts[0] if peers is None else peers
    profile = generate_network(config, peers=n)
    dataset = generate_dataset(config, profile.objects_stored_n, peers=n)
    stores, profile = partition_data(dataset, profile, config.partition_strategy, config.seed)
    return Network(profile, stores, DbCostModel(*config.db_cost_constants))


def generate_query(
    network: Network, k: int, restriction_count: int, seed: int, targets: str = "random"
) -> Query:
    """Random query over ``restriction_count`` distinct attributes.

    Targets are drawn uniformly from each attribute's domain (``random``) or
    copied from a randomly chosen stored object (``example``). Weights are
    uniform in [0.5, 1.5].
    """
    schema = network.schema
    m = min(restriction_count, schema.arity)
    rng = _rng(seed, _QUERY, len(network.peer_ids), restriction_count)
    attrs = sorted(rng.choice(schema.arity, size=m, replace=False).tolist())
    weights = np.round(rng.uniform(0.5, 1.5, size=m), 3).tolist()
    if targets == "example":
        nonempty = [pid for pid in network.peer_ids if len(network.stores[pid])]
        if not nonempty:
            raise ConfigError("cannot draw an example object from an empty network")
        store = network.stores[nonempty[int(rng.integers(len(nonempty)))]]
        example = store.records([int(rng.integers(len(store)))])[0]
        values = [example.attributes[j] for j in attrs]
    elif targets == "random":
        values = []
        for j in attrs:
            attr = schema[j]
            if attr.is_numeric and schema.name == "census":
                values.append(float(rng.integers(int(attr.low), int(attr.high) + 1)))
            elif attr.is_numeric:
                values.append(float(np.round(rng.uniform(attr.low, attr.high), 2)))
            else:
                values.append(attr.domain[int(rng.integers(len(attr.domain)))])
    else:
        raise ConfigError(f"unknown query target mode {targets!r}")
    restrictions = tuple(Restriction(j, v, float(w)) for j, v, w in zip(attrs, values, weights))
    return Query(schema, k, restrictions)


# -- oracle -------------------------------------------------------------------


def brute_force_top_k(
    stores: Mapping[int, PeerStore] | PeerStore, query: Query, k: int | None = None
) -> list[ScoredObject]:
    """Full scan; sort by (score desc, peer asc, object id asc); take k."""
    if isinstance(stores, PeerStore):
        stores = {stores.peer_id: stores}
    k = query.k if k is None else k
    candidates = []
    for pid, store in stores.items():
        if not len(store):
            continue
        s = store.scores(query)
        if len(s) > k:
            # anything below the store's own k-th best cannot qualify
            cut = np.partition(s, len(s) - k)[len(s) - k]
            rows = np.flatnonzero(s >= cut)
        else:
            rows = np.arange(len(s))
        for row in rows.tolist():
            candidates.append((-float(s[row]), pid, int(store.ids[row]), row))
    candidates.sort()
    out = []
    for neg, pid, _, row in candidates[:k]:
        out.append(ScoredObject(stores[pid].records([row])[0], -neg, pid))
    return out


# -- policies -----------------------------------------------------------------


def run_policy(network: Network, query: Query, name: str, config: ExperimentConfig | None = None) -> QueryResult:
    """Run one named policy (an ADiT heuristic, ``arto`` or ``optimum``)."""
    cons = config.cons_factor if config else 2.0
    strict = config.strict_ties if config else False
    if name == "arto":
        initial = config.arto_initial_batch if config else None
        remainder = config.arto_remainder_batch if config else 1
        return arto_top_k(network, query, initial, remainder, strict)
    if name == "optimum":
        return approximate_optimum(network, query, strict)
    return adit_top_k(network, query, HeuristicPolicy.parse(name, cons), strict)


def optimum_grid(k: int) -> list[int]:
    """Uniform fetch sizes tried by the optimum sweep: 1..8, then ~x1.5 steps up to k."""
    sizes = set(range(1, min(k, 8) + 1))
    f = 8.0
    while f < k:
        f *= 1.5
        sizes.add(min(k, int(math.ceil(f))))
    sizes.add(k)
    return sorted(sizes)


def approximate_optimum(network: Network, query: Query, strict_ties: bool = False) -> QueryResult:
    """Best answer time over uniform fetch sizes (see :func:`optimum_grid`)."""
    best = None
    for f in optimum_grid(query.k):
        res = adit_top_k(network, query, HeuristicPolicy(PolicyKind.UNIFORM, size=f), strict_ties)
        if best is None or res.query_answer_time < best.query_answer_time:
            best = res
    best.policy = "optimum"
    return best


# -- benchmark ----------------------------------------------------------------


@dataclass
class BenchmarkResult:
    rows: list[dict]
    mismatches: list[str] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in self.rows:
            writer.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
        return buf.getvalue()

    def write_csv(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv(), encoding="utf-8")


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def same_answer(result: QueryResult, oracle: list[ScoredObject], strict_ties: bool = False) -> bool:
    """Score sequences equal; with ``strict_ties`` also the objects themselves."""
    if strict_ties:
        got = [(r.score, r.origin_peer, r.object_id) for r in result.results]
        want = [(r.score, r.origin_peer, r.object_id) for r in oracle]
        return got == want
    return [r.score for r in result.results] == [r.score for r in oracle]


def run_benchmark(
    config: ExperimentConfig,
    verify: bool = False,
    progress: Callable[[str], None] | None = None,
) -> BenchmarkResult:
    """Run every (network size, query, policy) cell of ``config``.

    Ratios compare each policy with the enhanced heuristic on the same
    query; the enhanced run is performed even when it is not listed. With
    ``verify`` every cell is also checked against :func:`brute_force_top_k`.
    """
    rows = []
    mismatches = []
    for peers in config.peer_counts:
        network = build_network(config, peers)
        base_queries: dict[int, Query] = {}
        for spec in config.queries:
            m = spec.restriction_count
            if m not in base_queries:
                base_queries[m] = generate_query(network, 1, m, config.seed, config.query_targets)
            query = base_queries[m].with_k(spec.k)
            oracle = brute_force_top_k(network.stores, query) if verify else None
            cells: dict[str, QueryResult] = {}
            for name in dict.fromkeys([*config.policies, "enhanced"]):
                cell = f"peers={peers} k={spec.k} restrictions={m} policy={name}"
                if progress:
                    progress(cell)
                try:
                    cells[name] = run_policy(network, query, name, config)
                except AditError as exc:
                    raise CellError(f"{cell}: {exc}") from exc
                if oracle is not None and not same_answer(cells[name], oracle, config.strict_ties):
                    mismatches.append(cell)
            ref = cells["enhanced"]
            for name in config.policies:
                res = cells[name]
                se, qat = res.system_effort, res.query_answer_time
                try:
                    r_se, r_qat = ratios(se, qat, ref.system_effort, ref.query_answer_time)
                except AditError as exc:
                    raise CellError(f"peers={peers} k={spec.k} restrictions={m} policy={name}: {exc}") from exc
                rows.append(
                    {
                        "seed": config.seed,
                        "peers": peers,
                        "k": spec.k,
                        "restrictions": m,
                        "policy": name,
                        "iterations": res.iterations,
                        "messages": res.messages,
                        "objects_moved": res.objects_moved,
                        "se_seconds": se,
                        "qat_seconds": qat,
                        "ratio_se": r_se,
                        "ratio_qat": r_qat,
                        "short_result": res.short,
                    }
                )
    metadata = {
        "config": config.to_dict(),
        "columns": list(CSV_COLUMNS),
        "ratio_reference": "enhanced",
        "verified": verify,
    }
    if "optimum" in config.policies:
        metadata["optimum"] = (
            "approximated: minimum answer time over uniform fetch sizes "
            "1..8 then geometric steps of 1.5 up to k"
        )
    return BenchmarkResult(rows, mismatches, metadata)


def write_metadata(result: BenchmarkResult, path: str | Path) -> None:
    Path(path).write_text(json.dumps(result.metadata, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def plot_ratios(rows: list[dict], out_prefix: str | Path) -> list[Path]:
    """One SVG per (peers, restrictions, metric): ratio vs k, one line per policy."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "adit"
    out_prefix = Path(out_prefix)
    written = []
    groups = sorted({(r["peers"], r["restrictions"]) for r in rows})
    for peers, m in groups:
        sub = [r for r in rows if r["peers"] == peers and r["restrictions"] == m]
        for metric in ("ratio_qat", "ratio_se"):
            fig, ax = plt.subplots(figsize=(7, 4.5))
            for policy in dict.fromkeys(r["policy"] for r in sub):
                pts = sorted((r["k"], r[metric]) for r in sub if r["policy"] == policy)
                ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=policy)
            ax.set_xlabel("k")
            ax.set_ylabel(metric)
            ax.set_yscale("log")
            ax.set_title(f"{metric} vs k, {peers} peers, {m} restrictions")
            ax.legend(fontsize="small")
            path = out_prefix.parent / f"{out_prefix.name}_{peers}p_{m}r_{metric}.svg"
            fig.savefig(path, format="svg", metadata={"Date": None})
            plt.close(fig)
            written.append(path)
    return written
