import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adit import (
    Attribute,
    DbCostModel,
    ObjectRecord,
    PeerProfile,
    PeerStore,
    Query,
    Restriction,
    Schema,
    brute_force_top_k,
    estimate_db_cost,
    open_cursor,
    score,
)
from adit.model import NUMERIC, SchemaError

from _instances import small_network

SCHEMA = Schema("r", (Attribute("x", NUMERIC, low=0.0, high=10.0),))
TOP = Query(SCHEMA, 4, (Restriction(0, 10.0),))


def store_of(values, peer_id=0, first_id=0):
    recs = [ObjectRecord(first_id + i, (float(v),)) for i, v in enumerate(values)]
    return PeerStore.from_records(peer_id, SCHEMA, recs)


def test_fetch_next_two_batches():
    cur = open_cursor(store_of([7, 1, 9, 8]), TOP)
    first = cur.fetch_next(2)
    assert [o.score for o in first.batch] == pytest.approx([0.9, 0.8], abs=1e-12)
    assert first.remaining_bound == pytest.approx(0.8, abs=1e-12)
    assert not first.exhausted
    second = cur.fetch_next(2)
    assert [o.score for o in second.batch] == pytest.approx([0.7, 0.1], abs=1e-12)
    assert second.exhausted
    assert second.remaining_bound == 0.0


def test_empty_store():
    cur = open_cursor(PeerStore.empty(3, SCHEMA), TOP)
    assert cur.available == 0
    res = cur.fetch_next(5)
    assert res.batch == [] and res.exhausted and res.remaining_bound == 0.0


def test_full_drain_in_one_batch():
    cur = open_cursor(store_of(range(10)), TOP)
    res = cur.fetch_next(50)
    assert len(res.batch) == 10 and res.exhausted


def test_bound_before_any_fetch_is_one():
    cur = open_cursor(store_of([3, 4]), TOP)
    assert cur.last_object_id is None
    assert cur.fetch_next(1).remaining_bound == pytest.approx(0.4, abs=1e-12)


def test_fetch_size_must_be_positive():
    cur = open_cursor(store_of([1]), TOP)
    with pytest.raises(ValueError):
        cur.fetch_next(0)


def test_two_cursors_are_independent():
    store = store_of([5, 6, 7])
    a, b = open_cursor(store, TOP), open_cursor(store, TOP)
    a.fetch_next(2)
    assert b.fetch_next(1).batch[0].object_id == 2
    assert a.available == 1 and b.available == 2


def test_hundred_object_drain_is_sorted():
    rng = np.random.default_rng(5)
    store = store_of(np.round(rng.uniform(0, 10, 100), 1))
    cur = open_cursor(store, TOP)
    out = []
    while not cur.exhausted:
        out.extend(cur.fetch_next(7).batch)
    assert len(out) == 100
    scores = [o.score for o in out]
    assert scores == sorted(scores, reverse=True)
    # recomputable scores
    for o in out:
        assert o.score == score(o.object, TOP)


def test_ties_broken_by_object_id():
    cur = open_cursor(store_of([5, 5, 5], first_id=10), TOP)
    assert [o.object_id for o in cur.fetch_next(3).batch] == [10, 11, 12]


def test_schema_mismatch_rejected():
    other = Schema("s", SCHEMA.attributes)
    with pytest.raises(SchemaError):
        open_cursor(store_of([1]), Query(other, 1, (Restriction(0, 1.0),)))


def test_store_rejects_duplicate_ids():
    with pytest.raises(SchemaError):
        PeerStore(0, SCHEMA, np.array([1, 1]), [np.zeros(2)])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.lists(st.integers(1, 40), min_size=1, max_size=12))
def test_reentrancy_matches_single_call(seed, splits):
    net = small_network(seed, 1, [int(np.random.default_rng(seed).integers(0, 150))], "census")
    store = net.stores[0]
    rng = np.random.default_rng(seed)
    attrs = rng.choice(net.schema.arity, size=4, replace=False)
    restr = []
    for j in attrs:
        a = net.schema[int(j)]
        target = float(a.low) if a.is_numeric else a.domain[0]
        restr.append(Restriction(int(j), target, float(rng.uniform(0.5, 1.5))))
    total = sum(splits)
    q = Query(net.schema, total, tuple(restr))
    cur = open_cursor(store, q)
    got, bounds = [], []
    for n in splits:
        res = cur.fetch_next(n)
        for o in res.batch:
            # dominance: later objects never beat an earlier bound
            assert all(o.score <= b for b in bounds)
        got.extend(res.batch)
        bounds.append(res.remaining_bound)
    want = brute_force_top_k(store, q, total)
    assert [(o.object_id, o.score) for o in got] == [(o.object_id, o.score) for o in want]
    assert len({o.object_id for o in got}) == len(got)


PROFILE = PeerProfile(0, 1023, 2.0, 10.0, 0.05, 100)
Q4 = Query(
    Schema("r4", tuple(Attribute(f"a{i}", NUMERIC, low=0.0, high=1.0) for i in range(4))),
    1,
    tuple(Restriction(i, 0.5) for i in range(4)),
)


def test_db_cost_hand_value():
    model = DbCostModel(0.01, 0.001, 0.0001)
    # (0.01 + 0.001*4*log2(1024) + 0.0001*10) / 2
    assert estimate_db_cost(PROFILE, Q4, 10, model) == pytest.approx(0.0255, abs=1e-12)


def test_db_cost_zero_model():
    assert DbCostModel(0, 0, 0).estimate(PROFILE, Q4, 1000) == 0.0


def test_db_cost_speed_scaling():
    model = DbCostModel()
    fast = PeerProfile(0, 1023, 4.0, 10.0, 0.05, 100)
    assert model.estimate(fast, Q4, 7) == pytest.approx(model.estimate(PROFILE, Q4, 7) / 2, rel=1e-12)


def test_db_cost_rejects_negative():
    with pytest.raises(ValueError):
        DbCostModel(-1.0)
    with pytest.raises(ValueError):
        DbCostModel().estimate(PROFILE, Q4, -1)
    assert math.isfinite(DbCostModel().estimate(PROFILE, Q4, 0))
