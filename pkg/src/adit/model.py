"""Domain types and scoring semantics.

A relation is described by a :class:`Schema` of numeric and categorical
attributes. A :class:`Query` carries a set of weighted restrictions; an
object's score is the weighted average of its per-restriction similarities,
which is monotone in every similarity and lies in ``[0, 1]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

AttributeValue = Union[float, str]

NUMERIC = "numeric"
CATEGORICAL = "categorical"


class AditError(Exception):
    """Base class for errors raised by this package."""


class SchemaError(AditError, ValueError):
    """A value, restriction or record does not conform to its schema."""


class QueryError(AditError, ValueError):
    """A query violates its own invariants (k < 1, all weights zero, ...)."""


@dataclass(frozen=True)
class Attribute:
    """One column of a relation.

    Numeric attributes declare a ``[low, high]`` range used to normalise
    distances; categorical attributes declare their finite token domain.
    """

    name: str
    kind: str = CATEGORICAL
    domain: tuple[str, ...] = ()
    low: float = 0.0
    high: float = 0.0

    def __post_init__(self):
        if self.kind not in (NUMERIC, CATEGORICAL):
            raise SchemaError(f"attribute {self.name!r}: unknown kind {self.kind!r}")
        if self.kind == NUMERIC:
            if not (math.isfinite(self.low) and math.isfinite(self.high)):
                raise SchemaError(f"attribute {self.name!r}: range must be finite")
            if self.high < self.low:
                raise SchemaError(f"attribute {self.name!r}: high < low")
        else:
            if len(set(self.domain)) != len(self.domain):
                raise SchemaError(f"attribute {self.name!r}: duplicate domain tokens")

    @property
    def is_numeric(self) -> bool:
        return self.kind == NUMERIC

    @property
    def range(self) -> float:
        return self.high - self.low

    def code(self, token: str) -> int:
        """Index of ``token`` in the categorical domain."""
        try:
            return self.domain.index(token)
        except ValueError:
            raise SchemaError(
                f"attribute {self.name!r}: unknown token {token!r}"
            ) from None

    def check(self, value: AttributeValue) -> None:
        if self.is_numeric:
            if isinstance(value, str) or isinstance(value, bool):
                raise SchemaError(f"attribute {self.name!r} expects a number, got {value!r}")
            if not math.isfinite(value):
                raise SchemaError(f"attribute {self.name!r}: non-finite value {value!r}")
        else:
            if not isinstance(value, str):
                raise SchemaError(f"attribute {self.name!r} expects a token, got {value!r}")
            if value not in self.domain:
                raise SchemaError(f"attribute {self.name!r}: unknown token {value!r}")


@dataclass(frozen=True)
class Schema:
    name: str
    attributes: tuple[Attribute, ...]

    @property
    def arity(self) -> int:
        return len(self.attributes)

    def __getitem__(self, index: int) -> Attribute:
        return self.attributes[index]

    def index(self, name: str) -> int:
        for i, attr in enumerate(self.attributes):
            if attr.name == name:
                return i
        raise SchemaError(f"relation {self.name!r} has no attribute {name!r}")


@dataclass(frozen=True)
class ObjectRecord:
    object_id: int
    attributes: tuple[AttributeValue, ...]

    def validate(self, schema: Schema) -> None:
        if len(self.attributes) != schema.arity:
            raise SchemaError(
                f"object {self.object_id}: {len(self.attributes)} attributes, "
                f"relation {schema.name!r} has arity {schema.arity}"
            )
        for attr, value in zip(schema.attributes, self.attributes):
            attr.check(value)


@dataclass(frozen=True)
class Restriction:
    attribute_index: int
    target: AttributeValue
    weight: float = 1.0


@dataclass(frozen=True)
class Query:
    """A top-k query over one relation.

    The only objective implemented is the weighted average of the
    per-restriction similarities.
    """

    schema: Schema
    k: int
    restrictions: tuple[Restriction, ...]
    objective: str = "weighted-average"

    def __post_init__(self):
        if self.k < 1:
            raise QueryError(f"k must be >= 1, got {self.k}")
        if not self.restrictions:
            raise QueryError("a query needs at least one restriction")
        if self.objective != "weighted-average":
            raise QueryError(f"unsupported objective {self.objective!r}")
        for r in self.restrictions:
            if not 0 <= r.attribute_index < self.schema.arity:
                raise SchemaError(
                    f"restriction attribute index {r.attribute_index} out of range "
                    f"for arity {self.schema.arity}"
                )
            if not (r.weight >= 0 and math.isfinite(r.weight)):
                raise QueryError(f"restriction weight must be finite and >= 0, got {r.weight}")
            self.schema[r.attribute_index].check(r.target)
        if not any(r.weight > 0 for r in self.restrictions):
            raise QueryError("at least one restriction needs a positive weight")

    @property
    def total_weight(self) -> float:
        total = 0.0
        for r in self.restrictions:
            total += r.weight
        return total

    def with_k(self, k: int) -> "Query":
        return Query(self.schema, k, self.restrictions, self.objective)


@dataclass(frozen=True, order=False)
class ScoredObject:
    object: ObjectRecord
    score: float
    origin_peer: int

    @property
    def object_id(self) -> int:
        return self.object.object_id

    @property
    def sort_key(self) -> tuple[float, int, int]:
        """Total order used everywhere: score desc, peer asc, object id asc."""
        return (-self.score, self.origin_peer, self.object.object_id)


def similarity(value: AttributeValue, restriction: Restriction, attribute: Attribute) -> float:
    """Similarity of ``value`` to the restriction target, in ``[0, 1]``."""
    target = restriction.target
    if attribute.is_numeric:
        if isinstance(value, str) or isinstance(target, str):
            raise SchemaError(f"attribute {attribute.name!r}: numeric/categorical mismatch")
        span = attribute.range
        if span == 0:
            return 1.0 if value == target else 0.0
        return min(1.0, max(0.0, 1.0 - abs(value - target) / span))
    if not isinstance(value, str) or not isinstance(target, str):
        raise SchemaError(f"attribute {attribute.name!r}: numeric/categorical mismatch")
    return 1.0 if value == target else 0.0


def combine(similarities: Sequence[float], weights: Sequence[float]) -> float:
    """Weighted average of similarities. Accumulation order is fixed (left to right)."""
    acc = 0.0
    total = 0.0
    for s, w in zip(similarities, weights):
        acc += w * s
        total += w
    if total <= 0:
        raise QueryError("all restriction weights are zero")
    return acc / total


def score(obj: ObjectRecord, query: Query) -> float:
    if len(obj.attributes) != query.schema.arity:
        raise SchemaError(
            f"object {obj.object_id} does not match relation {query.schema.name!r}"
        )
    sims = [
        similarity(obj.attributes[r.attribute_index], r, query.schema[r.attribute_index])
        for r in query.restrictions
    ]
    return combine(sims, [r.weight for r in query.restrictions])


def score_columns(columns: Sequence[np.ndarray], query: Query) -> np.ndarray:
    """Vectorised :func:`score` over column-major storage.

    Numeric columns hold float64 values, categorical columns hold integer
    codes into the attribute domain. The arithmetic mirrors :func:`score`
    operation for operation, so both give bit-identical results. Numeric
    columns of any dtype are widened to float64 first.
    """
    n = len(columns[0]) if columns else 0
    acc = np.zeros(n, dtype=np.float64)
    for r in query.restrictions:
        attr = query.schema[r.attribute_index]
        col = columns[r.attribute_index]
        if attr.is_numeric:
            col = np.asarray(col, dtype=np.float64)
            span = attr.range
            if span == 0:
                sim = (col == r.target).astype(np.float64)
            else:
                sim = np.minimum(1.0, np.maximum(0.0, 1.0 - np.abs(col - r.target) / span))
        else:
            sim = (col == attr.code(r.target)).astype(np.float64)
        acc = acc + r.weight * sim
    return acc / query.total_weight
