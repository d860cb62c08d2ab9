import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from adit import CostLedger, CostRow, PeerProfile, comm_costs, query_answer_time, ratios, system_effort, trans_costs
from adit.costsim import DegenerateRunError

P = PeerProfile(0, 10, 1.0, 8.0, 0.05, 1000)


def test_comm_costs():
    assert comm_costs(P, 0) == 0.0
    assert comm_costs(P, 3) == pytest.approx(0.15, abs=1e-12)
    assert comm_costs(P, 6) == pytest.approx(2 * comm_costs(P, 3), abs=1e-12)


def test_trans_costs():
    assert trans_costs(P, 0) == 0.0
    # 1000 bytes * 8 * 100 / 8 Mbit/s
    assert trans_costs(P, 100) == pytest.approx(0.1, abs=1e-12)
    fast = PeerProfile(0, 10, 1.0, 16.0, 0.05, 1000)
    assert trans_costs(fast, 100) == pytest.approx(0.05, abs=1e-12)


def test_negative_counts_rejected():
    with pytest.raises(ValueError):
        comm_costs(P, -1)
    with pytest.raises(ValueError):
        trans_costs(P, -1)
    with pytest.raises(ValueError):
        CostRow(0, 0, -0.1, 0, 0)


def row(it, pid, c, d=0.0, t=0.0, seq=False):
    return CostRow(it, pid, c, d, t, sequential=seq)


def test_system_effort_examples():
    assert system_effort(CostLedger()) == 0.0
    one = CostLedger([row(0, 0, 0.1, 0.2, 0.3)])
    assert system_effort(one) == pytest.approx(0.6, abs=1e-12)
    two = CostLedger([row(0, 0, 0.1, 0.2, 0.3), row(0, 1, 0.1, 0.2, 0.3)])
    assert system_effort(two) == pytest.approx(2 * system_effort(one), abs=1e-12)


def test_answer_time_examples():
    assert query_answer_time(CostLedger([row(0, 0, 0.2), row(0, 1, 0.5)])) == 0.5
    assert query_answer_time(CostLedger([row(0, 0, 0.5), row(1, 0, 0.3)])) == pytest.approx(0.8, abs=1e-12)
    single = CostLedger([row(0, 0, 0.1, 0.2), row(1, 0, 0.3, 0.1, 0.05)])
    assert query_answer_time(single) == pytest.approx(system_effort(single), abs=1e-12)


def test_sequential_rows_are_not_overlapped():
    led = CostLedger([row(0, 0, 0.2), row(0, 1, 0.5), row(1, 0, 0.1, seq=True), row(2, 1, 0.1, seq=True)])
    assert query_answer_time(led) == pytest.approx(0.7, abs=1e-12)


def test_ratios():
    assert ratios(2.0, 3.0, 2.0, 3.0) == (1.0, 1.0)
    assert ratios(8.0, 1.0, 1.0, 1.0)[0] == 8.0
    assert ratios(1.0, 200.0, 1.0, 1.0)[1] == 200.0
    with pytest.raises(DegenerateRunError):
        ratios(1.0, 1.0, 0.0, 1.0)


def test_ledger_accounting():
    led = CostLedger([CostRow(0, 0, 0.1, 0.0, 0.0, 1, 4), CostRow(1, 0, 0.1, 0, 0, 1, 2), CostRow(1, 2, 0.1, 0, 0, 1, 0)])
    assert led.messages == 3 and led.objects_moved == 6 and led.iterations == 2
    assert led.messages_to(0) == 2 and led.messages_to(2) == 1


costs = st.floats(0, 5, allow_nan=False)
rows = st.lists(
    st.builds(
        CostRow,
        st.integers(0, 6),
        st.integers(0, 5),
        costs,
        costs,
        costs,
        st.just(1),
        st.integers(0, 50),
        st.booleans(),
    ),
    max_size=40,
)


@given(rows)
def test_answer_time_bounded_by_effort(rs):
    led = CostLedger(rs)
    assert query_answer_time(led) <= system_effort(led) + 1e-9


@given(rows)
def test_effort_additivity(rs):
    led = CostLedger(rs)
    c, d, t = led.totals()
    assert math.isclose(system_effort(led), c + d + t, rel_tol=0, abs_tol=1e-9)


@given(rows, st.randoms())
def test_schedule_independence(rs, rnd):
    shuffled = list(rs)
    rnd.shuffle(shuffled)
    a, b = CostLedger(rs), CostLedger(shuffled)
    assert query_answer_time(a) == query_answer_time(b)
    assert system_effort(a) == system_effort(b)
