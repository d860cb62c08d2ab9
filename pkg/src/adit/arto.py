"""Remainder-query baseline.

One parallel round asks every peer for ``initial_batch`` objects. After
that the coordinator works strictly sequentially: while fewer than k
objects can be published it sends a remainder request of
``remainder_batch`` objects to the single peer with the highest remaining
score (lowest peer id on ties). Publishing uses the same threshold rule as
:func:`adit.coordinator.adit_top_k`, so the answer is exact.
"""

from __future__ import annotations

from .coordinator import (
    IterationTrace,
    QueryResult,
    fetch_into,
    finish,
    publish_round,
    start,
)
from .local import Network
from .model import Query


def arto_top_k(
    network: Network,
    query: Query,
    initial_batch: int | None = None,
    remainder_batch: int = 1,
    strict_ties: bool = False,
) -> QueryResult:
    k = query.k
    if initial_batch is None:
        initial_batch = -(-k // len(network.peer_ids))
    if initial_batch < 1 or remainder_batch < 1:
        raise ValueError("batch sizes must be >= 1")

    states, cursors, buffer, ledger = start(network, query)
    traces: list[IterationTrace] = []

    peers = network.peer_ids
    delivered = {
        pid: fetch_into(network, query, pid, initial_batch, cursors[pid], states[pid], buffer, ledger, 0)
        for pid in peers
    }
    count, max_rem = publish_round(states, buffer, k, strict_ties)
    traces.append(
        IterationTrace(0, {pid: initial_batch for pid in peers}, delivered, len(peers), count, max_rem)
    )

    while buffer.published < k:
        live = [pid for pid in peers if not states[pid].exhausted]
        if not live:
            break
        target = max(live, key=lambda pid: (states[pid].remaining_bound, -pid))
        step = len(traces)
        n = fetch_into(
            network, query, target, remainder_batch, cursors[target], states[target],
            buffer, ledger, step, sequential=True,
        )
        count, max_rem = publish_round(states, buffer, k, strict_ties)
        traces.append(
            IterationTrace(step, {target: remainder_batch}, {target: n}, 1, count, max_rem, sequential=True)
        )
    return finish(buffer, ledger, traces, k, "arto")
