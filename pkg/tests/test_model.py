import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adit import Attribute, ObjectRecord, Query, Restriction, Schema, score, similarity
from adit.model import CATEGORICAL, NUMERIC, QueryError, SchemaError, combine, score_columns

NUM = Attribute("x", NUMERIC, low=0.0, high=10.0)
CAT = Attribute("c", CATEGORICAL, ("A", "B", "C"))
SCHEMA = Schema("r", (NUM, CAT, Attribute("y", NUMERIC, low=-5.0, high=5.0)))


def test_similarity_numeric_identity():
    assert similarity(5.0, Restriction(0, 5.0), NUM) == 1.0


def test_similarity_numeric_max_distance():
    assert similarity(0.0, Restriction(0, 10.0), NUM) == 0.0


def test_similarity_categorical_mismatch():
    assert similarity("A", Restriction(1, "B"), CAT) == 0.0
    assert similarity("B", Restriction(1, "B"), CAT) == 1.0


def test_similarity_clamps_outside_range():
    assert similarity(25.0, Restriction(0, 0.0), NUM) == 0.0


def test_similarity_zero_range_is_equality():
    flat = Attribute("z", NUMERIC, low=3.0, high=3.0)
    assert similarity(3.0, Restriction(0, 3.0), flat) == 1.0
    assert similarity(2.0, Restriction(0, 3.0), flat) == 0.0


def test_similarity_kind_mismatch():
    with pytest.raises(SchemaError):
        similarity("A", Restriction(0, 5.0), NUM)
    with pytest.raises(SchemaError):
        similarity(1.0, Restriction(1, "A"), CAT)


def test_score_two_equal_weights():
    q = Query(SCHEMA, 1, (Restriction(0, 5.0, 1.0), Restriction(1, "A", 1.0)))
    assert score(ObjectRecord(1, (5.0, "B", 0.0)), q) == 0.5


def test_score_single_restriction_normalised():
    q = Query(SCHEMA, 1, (Restriction(0, 10.0, 3.0),))
    # |7 - 10| / 10 = 0.3 distance
    assert score(ObjectRecord(1, (7.0, "A", 0.0)), q) == pytest.approx(0.7, abs=1e-12)


def test_score_weighted_hand_value():
    # weights (2, 1), sims (1.0, 0.4): (2 + 0.4) / 3
    q = Query(SCHEMA, 1, (Restriction(1, "A", 2.0), Restriction(0, 10.0, 1.0)))
    assert score(ObjectRecord(1, (4.0, "A", 0.0)), q) == pytest.approx(0.8, abs=1e-12)
    assert combine([1.0, 0.4], [2.0, 1.0]) == pytest.approx(0.8, abs=1e-12)


def test_zero_weight_restriction_is_ignored():
    q = Query(SCHEMA, 1, (Restriction(1, "A", 1.0), Restriction(0, 10.0, 0.0)))
    assert score(ObjectRecord(1, (0.0, "A", 0.0)), q) == 1.0


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(k=0, restrictions=(Restriction(0, 1.0),)),
        dict(k=1, restrictions=()),
        dict(k=1, restrictions=(Restriction(0, 1.0, 0.0),)),
        dict(k=1, restrictions=(Restriction(0, 1.0, -1.0),)),
        dict(k=1, restrictions=(Restriction(0, 1.0, math.nan),)),
    ],
)
def test_query_invariants(kwargs):
    with pytest.raises(QueryError):
        Query(SCHEMA, **kwargs)


def test_query_rejects_bad_attribute_or_token():
    with pytest.raises(SchemaError):
        Query(SCHEMA, 1, (Restriction(7, 1.0),))
    with pytest.raises(SchemaError):
        Query(SCHEMA, 1, (Restriction(1, "Z"),))
    with pytest.raises(SchemaError):
        Query(SCHEMA, 1, (Restriction(0, "A"),))


def test_record_validation():
    ObjectRecord(1, (1.0, "A", 0.0)).validate(SCHEMA)
    with pytest.raises(SchemaError):
        ObjectRecord(1, (1.0, "A")).validate(SCHEMA)
    with pytest.raises(SchemaError):
        ObjectRecord(1, (math.inf, "A", 0.0)).validate(SCHEMA)
    with pytest.raises(SchemaError):
        ObjectRecord(1, (1.0, "Q", 0.0)).validate(SCHEMA)


def test_score_rejects_wrong_arity():
    q = Query(SCHEMA, 1, (Restriction(0, 1.0),))
    with pytest.raises(SchemaError):
        score(ObjectRecord(1, (1.0,)), q)


def test_attribute_invariants():
    with pytest.raises(SchemaError):
        Attribute("bad", NUMERIC, low=2.0, high=1.0)
    with pytest.raises(SchemaError):
        Attribute("dup", CATEGORICAL, ("a", "a"))
    with pytest.raises(SchemaError):
        Attribute("kind", "text")


values = st.floats(-20, 20, allow_nan=False)
tokens = st.sampled_from(CAT.domain)
weights = st.floats(0.01, 5.0)


@st.composite
def scored_case(draw):
    rec = ObjectRecord(1, (draw(values), draw(tokens), draw(values)))
    restr = (
        Restriction(0, draw(st.floats(0, 10)), draw(weights)),
        Restriction(1, draw(tokens), draw(weights)),
        Restriction(2, draw(st.floats(-5, 5)), draw(weights)),
    )
    return rec, Query(SCHEMA, 1, restr)


@given(scored_case())
def test_score_in_unit_interval(case):
    rec, q = case
    assert 0.0 <= score(rec, q) <= 1.0


@given(scored_case(), st.floats(0, 10))
def test_score_monotone_in_similarity(case, target):
    # moving the numeric value onto the target cannot lower the score
    rec, q = case
    r0 = q.restrictions[0]
    before = score(rec, q)
    closer = ObjectRecord(1, (r0.target, *rec.attributes[1:]))
    assert score(closer, q) >= before
    assert score(rec, q) == before


@given(
    st.lists(st.floats(0, 1), min_size=1, max_size=8),
    st.lists(st.floats(0.01, 3), min_size=8, max_size=8),
    st.integers(0, 7),
    st.floats(0, 1),
)
def test_combine_monotone(sims, ws, i, bump):
    i %= len(sims)
    raised = list(sims)
    raised[i] = max(sims[i], bump)
    assert combine(raised, ws[: len(sims)]) >= combine(sims, ws[: len(sims)])


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_vectorised_score_matches_scalar_bitwise(seed):
    rng = np.random.default_rng(seed)
    n = 30
    cols = [
        np.round(rng.uniform(-2, 12, n), 3),
        rng.integers(0, 3, n).astype(np.int16),
        rng.integers(-5, 6, n).astype(np.int16),
    ]
    restr = (
        Restriction(0, float(rng.uniform(0, 10)), float(rng.uniform(0.1, 2))),
        Restriction(1, CAT.domain[int(rng.integers(3))], float(rng.uniform(0.1, 2))),
        Restriction(2, float(rng.integers(-5, 6)), float(rng.uniform(0.1, 2))),
    )
    q = Query(SCHEMA, 1, restr)
    vec = score_columns(cols, q)
    for i in range(n):
        rec = ObjectRecord(i, (float(cols[0][i]), CAT.domain[cols[1][i]], float(cols[2][i])))
        assert vec[i] == score(rec, q)
