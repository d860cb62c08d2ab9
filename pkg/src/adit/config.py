"""Experiment configuration, loadable from JSON.

JSON keys may be written in camelCase (``peerCount``) or snake_case
(``peer_count``). ``peerCount`` accepts a single count or a list, in which
case the whole query/policy grid is repeated for every network size.
"""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

from .network import ConfigError

STRATEGIES = ("roundRobin", "sizeWeighted", "shuffled")
DATASET_KINDS = ("census", "uniform", "csv")
ALL_POLICIES = ("fixed1", "fixedk", "ceil", "floor", "basic", "enhanced", "arto")


def _snake(name: str) -> str:
    return re.sub(r"(?<!^)(?=[A-Z])", "_", name).lower()


def _normalise(d: dict) -> dict:
    return {_snake(k): v for k, v in d.items()}


def _pair(value, name: str, cast=float) -> tuple:
    try:
        lo, hi = value
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a [min, max] pair, got {value!r}") from None
    lo, hi = cast(lo), cast(hi)
    if hi < lo:
        raise ConfigError(f"{name} is empty: [{lo}, {hi}]")
    return (lo, hi)


@dataclass
class DatasetConfig:
    """Where the objects come from.

    ``census`` draws coded attributes with skewed value frequencies; an
    ``ordinal_fraction`` of them are ordinal codes (numeric, range
    ``0..d-1``), the rest categorical tokens. ``uniform`` draws every
    attribute uniformly (``numeric_fraction`` of them numeric in
    ``[0, 100]``). ``csv`` reads ``path``; its optional ``schema`` is a list
    of ``{name, kind, domain | low, high}``.
    """

    kind: str = "census"
    arity: int = 68
    ordinal_fraction: float = 0.5
    numeric_fraction: float = 0.0
    domain_size_range: tuple[int, int] = (2, 16)
    path: str | None = None
    schema: list[dict] | None = None

    def __post_init__(self):
        if self.kind not in DATASET_KINDS:
            raise ConfigError(f"dataset kind must be one of {DATASET_KINDS}, got {self.kind!r}")
        if self.kind == "csv" and not self.path:
            raise ConfigError("csv dataset needs a path")
        if self.arity < 1:
            raise ConfigError("arity must be >= 1")
        if not 0 <= self.numeric_fraction <= 1 or not 0 <= self.ordinal_fraction <= 1:
            raise ConfigError("numeric_fraction and ordinal_fraction must lie in [0, 1]")
        self.domain_size_range = _pair(self.domain_size_range, "domain_size_range", int)
        if self.domain_size_range[0] < 1:
            raise ConfigError("domain sizes must be >= 1")


@dataclass
class QuerySpec:
    k: int
    restriction_count: int

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError(f"query k must be >= 1, got {self.k}")
        if self.restriction_count < 1:
            raise ConfigError("restriction_count must be >= 1")


@dataclass
class ExperimentConfig:
    seed: int = 0
    peer_count: int | list[int] = 19
    per_peer_size_range: tuple[int, int] = (1000, 5000)
    speed_range: tuple[float, float] = (1.0, 10.0)
    trans_rate_range: tuple[float, float] = (1.0, 100.0)
    msg_cost_range: tuple[float, float] = (0.05, 0.2)
    object_size_bytes: int = 136
    dataset: DatasetConfig = field(default_factory=DatasetConfig)
    partition_strategy: str = "sizeWeighted"
    queries: list[QuerySpec] = field(
        default_factory=lambda: [
            QuerySpec(k, m) for m in (4, 12) for k in (1, 5, 10, 20, 50, 100)
        ]
    )
    policies: list[str] = field(default_factory=lambda: list(ALL_POLICIES))
    db_cost_constants: tuple[float, float, float] = (0.02, 0.0005, 0.0005)
    cons_factor: float = 2.0
    arto_initial_batch: int | None = None
    arto_remainder_batch: int = 1
    strict_ties: bool = False
    query_targets: str = "random"

    def __post_init__(self):
        if isinstance(self.dataset, dict):
            self.dataset = DatasetConfig(**_normalise(self.dataset))
        self.queries = [
            q if isinstance(q, QuerySpec) else QuerySpec(**_normalise(q)) for q in self.queries
        ]
        counts = self.peer_counts
        if not counts or min(counts) < 1:
            raise ConfigError("peer_count must be >= 1")
        self.per_peer_size_range = _pair(self.per_peer_size_range, "per_peer_size_range", int)
        if self.per_peer_size_range[0] < 1 or self.per_peer_size_range[1] > 10**7:
            raise ConfigError("per_peer_size_range must lie within [1, 1e7]")
        self.speed_range = _pair(self.speed_range, "speed_range")
        if self.speed_range[0] < 1 or self.speed_range[1] > 10:
            raise ConfigError("speed_range must lie within [1, 10]")
        self.trans_rate_range = _pair(self.trans_rate_range, "trans_rate_range")
        if self.trans_rate_range[0] <= 0:
            raise ConfigError("transmission rates must be > 0")
        self.msg_cost_range = _pair(self.msg_cost_range, "msg_cost_range")
        if self.msg_cost_range[0] < 0:
            raise ConfigError("message costs must be >= 0")
        if self.object_size_bytes < 1:
            raise ConfigError("object_size_bytes must be >= 1")
        if self.partition_strategy not in STRATEGIES:
            raise ConfigError(
                f"partition_strategy must be one of {STRATEGIES}, got {self.partition_strategy!r}"
            )
        if len(self.db_cost_constants) != 3 or min(self.db_cost_constants) < 0:
            raise ConfigError("db_cost_constants must be three numbers >= 0")
        self.db_cost_constants = tuple(float(c) for c in self.db_cost_constants)
        if not self.cons_factor > 0:
            raise ConfigError("cons_factor must be > 0")
        if self.query_targets not in ("random", "example"):
            raise ConfigError("query_targets must be 'random' or 'example'")
        if not self.queries:
            raise ConfigError("at least one query is required")
        if not self.policies:
            raise ConfigError("at least one policy is required")

    @property
    def peer_counts(self) -> list[int]:
        if isinstance(self.peer_count, int):
            return [self.peer_count]
        return [int(c) for c in self.peer_count]

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExperimentConfig":
        data = _normalise(data)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"config {path} must hold a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)
