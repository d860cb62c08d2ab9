"""Per-peer reentrant local top-k processing.

Each peer answers successive requests for "the next n best objects" of a
query without repeating itself, so that two calls for 5 and 10 objects
together yield the peer's best 15. The local processor here simply
materialises the full sorted run the first time a query reaches the peer;
its cost is modelled by :class:`DbCostModel`, never measured.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .model import ObjectRecord, Query, Schema, SchemaError, ScoredObject, score_columns
from .network import ConfigError, NetworkProfile, PeerProfile


@dataclass(eq=False)
class PeerStore:
    """Column-major storage of one peer's fragment of a relation.

    Numeric columns are float64; categorical columns hold integer codes
    into the attribute's domain.
    """

    peer_id: int
    schema: Schema
    ids: np.ndarray
    columns: list[np.ndarray]
    _runs: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.ids = np.asarray(self.ids, dtype=np.int64)
        if len(self.columns) != self.schema.arity:
            raise SchemaError(
                f"peer {self.peer_id}: {len(self.columns)} columns for arity {self.schema.arity}"
            )
        for col in self.columns:
            if len(col) != len(self.ids):
                raise SchemaError(f"peer {self.peer_id}: ragged columns")
        if len(np.unique(self.ids)) != len(self.ids):
            raise SchemaError(f"peer {self.peer_id}: duplicate object ids")

    def __len__(self) -> int:
        return len(self.ids)

    @classmethod
    def empty(cls, peer_id: int, schema: Schema) -> "PeerStore":
        cols = [
            np.empty(0, dtype=np.float64 if a.is_numeric else np.int32)
            for a in schema.attributes
        ]
        return cls(peer_id, schema, np.empty(0, dtype=np.int64), cols)

    @classmethod
    def from_records(
        cls, peer_id: int, schema: Schema, records: Iterable[ObjectRecord]
    ) -> "PeerStore":
        records = list(records)
        for rec in records:
            rec.validate(schema)
        ids = np.array([r.object_id for r in records], dtype=np.int64)
        cols = []
        for j, attr in enumerate(schema.attributes):
            if attr.is_numeric:
                cols.append(np.array([float(r.attributes[j]) for r in records], dtype=np.float64))
            else:
                cols.append(np.array([attr.code(r.attributes[j]) for r in records], dtype=np.int32))
        return cls(peer_id, schema, ids, cols)

    def take(self, rows: np.ndarray, peer_id: int | None = None) -> "PeerStore":
        """A new store holding the given rows (used for partitioning)."""
        return PeerStore(
            self.peer_id if peer_id is None else peer_id,
            self.schema,
            self.ids[rows],
            [c[rows] for c in self.columns],
        )

    def records(self, rows: Sequence[int] | np.ndarray) -> list[ObjectRecord]:
        rows = np.asarray(rows, dtype=np.int64)
        per_column = []
        for attr, col in zip(self.schema.attributes, self.columns):
            values = col[rows].tolist()
            if not attr.is_numeric:
                values = [attr.domain[c] for c in values]
            per_column.append(values)
        ids = self.ids[rows].tolist()
        return [ObjectRecord(oid, tuple(vals)) for oid, vals in zip(ids, zip(*per_column))]

    def all_records(self) -> list[ObjectRecord]:
        return self.records(np.arange(len(self)))

    def scores(self, query: Query) -> np.ndarray:
        return score_columns(self.columns, query)

    def sorted_run(self, query: Query) -> tuple[np.ndarray, np.ndarray]:
        """Row order by (score desc, object id asc) and the scores in that order.

        Cached per query; ``k`` does not influence the ordering.
        """
        key = (query.schema, query.restrictions, query.objective)
        run = self._runs.get(key)
        if run is None:
            s = self.scores(query)
            order = np.lexsort((self.ids, -s))
            run = (order, s[order])
            self._runs[key] = run
        return run


class FetchResult(NamedTuple):
    batch: list[ScoredObject]
    remaining_bound: float
    exhausted: bool


class LocalCursor:
    """Reentrant position in a peer's sorted run for one query."""

    def __init__(self, store: PeerStore, query: Query):
        if query.schema != store.schema:
            raise SchemaError(
                f"query over {query.schema.name!r} sent to peer {store.peer_id} "
                f"storing {store.schema.name!r}"
            )
        self.store = store
        self.query = query
        self.order, self.sorted_scores = store.sorted_run(query)
        self.delivered = 0
        self.last_score: float | None = None

    @property
    def available(self) -> int:
        return len(self.order) - self.delivered

    @property
    def exhausted(self) -> bool:
        return self.delivered >= len(self.order)

    def fetch_next(self, n: int) -> FetchResult:
        """Deliver the next ``min(n, available)`` best objects.

        The remaining bound is the score of the last delivered object, 1.0
        before anything was delivered, and 0.0 once the run is exhausted.
        """
        if n < 1:
            raise ValueError(f"fetch size must be >= 1, got {n}")
        start = self.delivered
        stop = min(start + n, len(self.order))
        rows = self.order[start:stop]
        scores = self.sorted_scores[start:stop].tolist()
        pid = self.store.peer_id
        batch = [
            ScoredObject(rec, s, pid) for rec, s in zip(self.store.records(rows), scores)
        ]
        self.delivered = stop
        if batch:
            self.last_score = batch[-1].score
        if self.exhausted:
            return FetchResult(batch, 0.0, True)
        bound = 1.0 if self.last_score is None else self.last_score
        return FetchResult(batch, bound, False)

    @property
    def last_object_id(self) -> int | None:
        if self.delivered == 0:
            return None
        return int(self.store.ids[self.order[self.delivered - 1]])


def open_cursor(store: PeerStore, query: Query) -> LocalCursor:
    return LocalCursor(store, query)


@dataclass(frozen=True)
class DbCostModel:
    """Peer-side search time: ``(c0 + c1*m*log2(1 + size) + c2*n) / speed``.

    ``m`` is the number of restrictions and ``n`` the number of objects
    returned. ``c0`` is charged even for an empty answer.
    """

    c0: float = 0.02
    c1: float = 0.0005
    c2: float = 0.0005

    def __post_init__(self):
        if min(self.c0, self.c1, self.c2) < 0:
            raise ConfigError("db cost constants must be >= 0")

    def estimate(self, profile: PeerProfile, query: Query, n: int) -> float:
        if n < 0:
            raise ValueError("n must be >= 0")
        if profile.speed <= 0:
            raise ConfigError(f"peer {profile.peer_id}: speed must be > 0")
        m = len(query.restrictions)
        work = self.c0 + self.c1 * m * math.log2(1 + profile.objects_stored) + self.c2 * n
        return work / profile.speed


def estimate_db_cost(
    profile: PeerProfile, query: Query, n: int, model: DbCostModel = DbCostModel()
) -> float:
    return model.estimate(profile, query, n)


@dataclass
class Network:
    """Peer profiles together with the stores they serve."""

    profile: NetworkProfile
    stores: Mapping[int, PeerStore]
    db_cost: DbCostModel = field(default_factory=DbCostModel)

    def __post_init__(self):
        ids = {p.peer_id for p in self.profile.peers}
        if set(self.stores) != ids:
            raise ConfigError("stores and peer profiles cover different peer ids")
        seen: set[int] = set()
        total = 0
        for store in self.stores.values():
            seen.update(store.ids.tolist())
            total += len(store)
        if len(seen) != total:
            raise SchemaError("object ids are not unique across peers")

    @property
    def peer_ids(self) -> list[int]:
        return [p.peer_id for p in self.profile.peers]

    @property
    def schema(self) -> Schema:
        return next(iter(self.stores.values())).schema

    @property
    def total_objects(self) -> int:
        return sum(len(s) for s in self.stores.values())
