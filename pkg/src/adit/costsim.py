"""Simulated cost accounting: system effort and query answer time.

Every request a coordinator sends to a peer is recorded as a
:class:`CostRow` tagged with the iteration it belongs to. Rows sharing an
iteration ran concurrently, so the answer time charges only the slowest of
them; rows flagged ``sequential`` form an iteration of their own.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterator

from .model import AditError
from .network import PeerProfile


class DegenerateRunError(AditError, ZeroDivisionError):
    """A ratio was requested against a zero-cost reference run."""


def comm_costs(profile: PeerProfile, msg_count: int) -> float:
    if msg_count < 0:
        raise ValueError("msg_count must be >= 0")
    return profile.msg_cost_seconds * msg_count


def trans_costs(profile: PeerProfile, n: int) -> float:
    """Seconds to ship ``n`` objects over the peer's link."""
    if n < 0:
        raise ValueError("n must be >= 0")
    bits = profile.object_size_bytes * 8 * n
    return bits / (profile.trans_rate_mbit * 1e6)


@dataclass(frozen=True)
class CostRow:
    iteration: int
    peer_id: int
    comm_seconds: float
    db_seconds: float
    trans_seconds: float
    msg_count: int = 1
    object_count: int = 0
    sequential: bool = False

    def __post_init__(self):
        if min(self.comm_seconds, self.db_seconds, self.trans_seconds) < 0:
            raise ValueError("cost entries must be >= 0")
        if self.msg_count < 0 or self.object_count < 0:
            raise ValueError("counts must be >= 0")

    @property
    def total(self) -> float:
        return self.comm_seconds + self.db_seconds + self.trans_seconds


@dataclass
class CostLedger:
    rows: list[CostRow] = field(default_factory=list)

    def add(self, row: CostRow) -> None:
        self.rows.append(row)

    def __iter__(self) -> Iterator[CostRow]:
        return iter(self.rows)

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def messages(self) -> int:
        return sum(r.msg_count for r in self.rows)

    @property
    def objects_moved(self) -> int:
        return sum(r.object_count for r in self.rows)

    @property
    def iterations(self) -> int:
        return len({r.iteration for r in self.rows})

    def by_iteration(self) -> dict[int, list[CostRow]]:
        groups: dict[int, list[CostRow]] = defaultdict(list)
        for r in self.rows:
            groups[r.iteration].append(r)
        return dict(sorted(groups.items()))

    def messages_to(self, peer_id: int) -> int:
        return sum(r.msg_count for r in self.rows if r.peer_id == peer_id)

    def totals(self) -> tuple[float, float, float]:
        """Summed (comm, db, trans) seconds."""
        return (
            math.fsum(r.comm_seconds for r in self.rows),
            math.fsum(r.db_seconds for r in self.rows),
            math.fsum(r.trans_seconds for r in self.rows),
        )


def system_effort(ledger: CostLedger) -> float:
    """Total time all peers spent on messages, local search and transfer."""
    per_peer: dict[int, list[float]] = defaultdict(list)
    for r in ledger:
        per_peer[r.peer_id].append(r.total)
    return math.fsum(math.fsum(v) for _, v in sorted(per_peer.items()))


def query_answer_time(ledger: CostLedger) -> float:
    """Critical path: per iteration the slowest peer, summed over iterations."""
    slowest = []
    for _, rows in ledger.by_iteration().items():
        if any(r.sequential for r in rows):
            # a sequential step is never overlapped with anything else
            slowest.append(math.fsum(r.total for r in rows))
        else:
            slowest.append(max(r.total for r in rows))
    return math.fsum(slowest)


def ratios(se_i: float, qat_i: float, se_enh: float, qat_enh: float) -> tuple[float, float]:
    """(Ratio_SE, Ratio_QAT) of a policy against the enhanced heuristic."""
    if se_enh <= 0 or qat_enh <= 0:
        raise DegenerateRunError("reference run has zero system effort or answer time")
    return se_i / se_enh, qat_i / qat_enh
