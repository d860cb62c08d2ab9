"""Iterative distributed top-k coordinator.

Each iteration the coordinator

1. determines the relevant peers (those that may still hold an object of
   the final answer),
2. assigns every relevant peer its own fetch size from the chosen policy,
3. sends all requests logically in parallel and merges the answers into a
   sorted buffer, and
4. once every peer has answered, publishes buffered objects whose score is
   at least the maximum remaining score over all peers.

It stops when k objects are published or no peer has anything left.

The answer always has exactly the scores of the brute-force top-k. Among
objects tying on the k-th score any may be returned. With
``strict_ties=True`` publishing additionally respects the global
(score desc, peer id, object id) order: an object that only ties the
maximum remaining score is held back while the peer owning that bound could
still deliver a tying object sorting before it. The answer is then
identical to the brute-force one object for object, at the price of extra
iterations on tie-heavy data.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Mapping

from .costsim import CostLedger, CostRow, comm_costs, query_answer_time, system_effort, trans_costs
from .heuristics import HeuristicPolicy, PeerQueryState, fetch_size
from .local import LocalCursor, Network, open_cursor
from .model import Query, ScoredObject


class FetchBuffer:
    """Objects fetched so far.

    Pending entries are kept sorted by (score desc, peer, object id);
    published entries are kept in publication order. Every published score
    is at least every pending score.
    """

    def __init__(self):
        self.pending: list[ScoredObject] = []
        self._keys: list[tuple[float, int, int]] = []
        self._ids: set[int] = set()
        self.published_entries: list[ScoredObject] = []

    def __len__(self) -> int:
        return len(self.pending) + len(self.published_entries)

    @property
    def published(self) -> int:
        return len(self.published_entries)

    def merge(self, batch: list[ScoredObject]) -> None:
        for obj in batch:
            if obj.object_id in self._ids:
                raise ValueError(f"object {obj.object_id} fetched twice")
            key = obj.sort_key
            pos = bisect.bisect_right(self._keys, key)
            self._keys.insert(pos, key)
            self.pending.insert(pos, obj)
            self._ids.add(obj.object_id)

    def head(self) -> ScoredObject | None:
        return self.pending[0] if self.pending else None

    def pop_head(self) -> ScoredObject:
        self._keys.pop(0)
        obj = self.pending.pop(0)
        self.published_entries.append(obj)
        return obj

    def kth_score(self, k: int) -> float | None:
        """Score of the k-th best object fetched so far (None if fewer than k)."""
        if len(self) < k:
            return None
        if k <= self.published:
            return sorted(e.score for e in self.published_entries)[-k]
        return self.pending[k - self.published - 1].score

    def results(self) -> list[ScoredObject]:
        return sorted(self.published_entries, key=lambda e: e.sort_key)


@dataclass
class IterationTrace:
    iteration: int
    fetch_sizes: dict[int, int]
    delivered: dict[int, int]
    messages: int
    published: int
    max_rem_score: float
    sequential: bool = False


@dataclass
class QueryResult:
    results: list[ScoredObject]
    ledger: CostLedger
    traces: list[IterationTrace]
    short: bool = False
    policy: str = ""

    @property
    def system_effort(self) -> float:
        return system_effort(self.ledger)

    @property
    def query_answer_time(self) -> float:
        return query_answer_time(self.ledger)

    @property
    def messages(self) -> int:
        return self.ledger.messages

    @property
    def objects_moved(self) -> int:
        return self.ledger.objects_moved

    @property
    def iterations(self) -> int:
        return len(self.traces)

    @property
    def scores(self) -> list[float]:
        return [r.score for r in self.results]


def relevant_peers(
    states: Mapping[int, PeerQueryState], buffer: FetchBuffer, k: int
) -> list[int]:
    """Peers that may still contribute to the top-k, in ascending id order.

    A peer is relevant unless it is exhausted or its remaining bound is
    below the k-th best score fetched so far. Unfetched peers carry the
    bound 1.0 and are therefore always relevant.
    """
    kth = buffer.kth_score(k)
    out = []
    for pid in sorted(states):
        st = states[pid]
        if st.exhausted:
            continue
        if kth is None or st.remaining_bound >= kth:
            out.append(pid)
    return out


def remaining_threshold(
    states: Mapping[int, PeerQueryState],
) -> tuple[float, tuple[int, int] | None]:
    """Maximum remaining score and the tie frontier that owns it.

    The frontier is ``(peer id, last delivered object id)`` of the
    lowest-id peer attaining the maximum; any undelivered object with that
    score sorts after it. Unfetched peers use object id -1.
    """
    best = None
    frontier = None
    for pid in sorted(states):
        st = states[pid]
        if st.exhausted:
            continue
        last = -1 if st.last_object_id is None else st.last_object_id
        if best is None or st.remaining_bound > best:
            best, frontier = st.remaining_bound, (pid, last)
    if best is None:
        return 0.0, None
    return best, frontier


def publish(
    buffer: FetchBuffer,
    max_rem_score: float,
    k: int,
    frontier: tuple[int, int] | None = None,
) -> int:
    """Publish buffered objects scoring at least ``max_rem_score``.

    Walks the pending objects in order and stops at the first one below the
    threshold or once ``k`` objects are published. A ``frontier``
    ``(peer, object id)`` additionally holds back objects that merely tie
    the threshold and sort after it. Returns the number published.
    """
    count = 0
    while buffer.published < k and buffer.pending:
        e = buffer.head()
        if e.score < max_rem_score:
            break
        if (
            frontier is not None
            and e.score == max_rem_score
            and (e.origin_peer, e.object_id) > frontier
        ):
            break
        buffer.pop_head()
        count += 1
    return count


def fetch_into(
    network: Network,
    query: Query,
    pid: int,
    n: int,
    cursor: LocalCursor,
    state: PeerQueryState,
    buffer: FetchBuffer,
    ledger: CostLedger,
    iteration: int,
    sequential: bool = False,
) -> int:
    """One request to one peer: fetch, merge, update its state, charge costs."""
    profile = network.profile.peer(pid)
    result = cursor.fetch_next(n)
    delivered = len(result.batch)
    state.msg_count += 1
    state.objects_retrieved += delivered
    state.remaining_bound = result.remaining_bound
    state.exhausted = result.exhausted
    state.last_object_id = cursor.last_object_id
    buffer.merge(result.batch)
    ledger.add(
        CostRow(
            iteration=iteration,
            peer_id=pid,
            comm_seconds=comm_costs(profile, 1),
            db_seconds=network.db_cost.estimate(profile, query, delivered),
            trans_seconds=trans_costs(profile, delivered),
            msg_count=1,
            object_count=delivered,
            sequential=sequential,
        )
    )
    return delivered


def publish_round(
    states: Mapping[int, PeerQueryState], buffer: FetchBuffer, k: int, strict_ties: bool = False
) -> tuple[int, float]:
    """Publish against the current threshold and credit the owning peers."""
    max_rem, frontier = remaining_threshold(states)
    before = buffer.published
    count = publish(buffer, max_rem, k, frontier if strict_ties else None)
    for e in buffer.published_entries[before:]:
        states[e.origin_peer].objects_published += 1
    return count, max_rem


def run_iteration(
    network: Network,
    query: Query,
    policy: HeuristicPolicy,
    states: Mapping[int, PeerQueryState],
    cursors: Mapping[int, LocalCursor],
    buffer: FetchBuffer,
    ledger: CostLedger,
    iteration: int,
    strict_ties: bool = False,
) -> IterationTrace | None:
    """Run one fetch/publish round. Returns None if no peer is relevant."""
    k = query.k
    relevant = relevant_peers(states, buffer, k)
    if not relevant:
        return None
    obj_pub_n = buffer.published
    # sizes are fixed before any answer arrives: the broadcast is parallel
    sizes = {
        pid: fetch_size(
            policy,
            k,
            network.profile,
            states[pid],
            network.profile.peer(pid),
            obj_pub_n,
            n_size=len(relevant),
        )
        for pid in relevant
    }
    delivered = {}
    for pid in relevant:
        delivered[pid] = fetch_into(
            network, query, pid, sizes[pid], cursors[pid], states[pid], buffer, ledger, iteration
        )
    count, max_rem = publish_round(states, buffer, k, strict_ties)
    return IterationTrace(iteration, sizes, delivered, len(relevant), count, max_rem)


def start(network: Network, query: Query):
    states = {pid: PeerQueryState() for pid in network.peer_ids}
    cursors = {pid: open_cursor(network.stores[pid], query) for pid in network.peer_ids}
    return states, cursors, FetchBuffer(), CostLedger()


def finish(buffer: FetchBuffer, ledger, traces, k: int, policy: str) -> QueryResult:
    results = buffer.results()
    return QueryResult(results, ledger, traces, short=len(results) < k, policy=policy)


def adit_top_k(
    network: Network, query: Query, policy: HeuristicPolicy, strict_ties: bool = False
) -> QueryResult:
    """Exact top-k of ``query`` over all peers of ``network``."""
    k = query.k
    states, cursors, buffer, ledger = start(network, query)
    traces: list[IterationTrace] = []
    while buffer.published < k:
        trace = run_iteration(
            network, query, policy, states, cursors, buffer, ledger, len(traces), strict_ties
        )
        if trace is None:
            # nothing left to ask; whatever is buffered can be released
            publish_round(states, buffer, k, strict_ties)
            break
        traces.append(trace)
    return finish(buffer, ledger, traces, k, policy.name)
