"""Static peer capabilities and the simulated network they form."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from .model import AditError


class ConfigError(AditError, ValueError):
    """Invalid experiment or network configuration."""


@dataclass(frozen=True)
class PeerProfile:
    """Capabilities of one peer.

    ``speed`` is on the 1 (slowest) to 10 (fastest) scale, ``trans_rate_mbit``
    is the link rate in Mbit/s and ``msg_cost_seconds`` the fixed cost of one
    request to this peer.
    """

    peer_id: int
    objects_stored: int
    speed: float
    trans_rate_mbit: float
    msg_cost_seconds: float
    object_size_bytes: int

    def __post_init__(self):
        if self.objects_stored < 0:
            raise ConfigError(f"peer {self.peer_id}: objects_stored must be >= 0")
        if not 1 <= self.speed <= 10:
            raise ConfigError(f"peer {self.peer_id}: speed {self.speed} outside [1, 10]")
        if not self.trans_rate_mbit > 0:
            raise ConfigError(f"peer {self.peer_id}: trans_rate_mbit must be > 0")
        if not self.msg_cost_seconds >= 0:
            raise ConfigError(f"peer {self.peer_id}: msg_cost_seconds must be >= 0")
        if not self.object_size_bytes > 0:
            raise ConfigError(f"peer {self.peer_id}: object_size_bytes must be > 0")


@dataclass(frozen=True)
class NetworkProfile:
    peers: tuple[PeerProfile, ...]

    def __post_init__(self):
        if not self.peers:
            raise ConfigError("a network needs at least one peer")
        ids = [p.peer_id for p in self.peers]
        if len(set(ids)) != len(ids):
            raise ConfigError("duplicate peer ids")

    @classmethod
    def of(cls, peers: Sequence[PeerProfile]) -> "NetworkProfile":
        return cls(tuple(sorted(peers, key=lambda p: p.peer_id)))

    @property
    def n_size(self) -> int:
        return len(self.peers)

    @property
    def objects_stored_n(self) -> int:
        return sum(p.objects_stored for p in self.peers)

    @property
    def max_speed_n(self) -> float:
        return max(p.speed for p in self.peers)

    @property
    def max_trans_rate_n(self) -> float:
        return max(p.trans_rate_mbit for p in self.peers)

    def peer(self, peer_id: int) -> PeerProfile:
        for p in self.peers:
            if p.peer_id == peer_id:
                return p
        raise KeyError(peer_id)

    def with_sizes(self, sizes: Mapping[int, int]) -> "NetworkProfile":
        """Copy with ``objects_stored`` replaced by actual store sizes."""
        return NetworkProfile(
            tuple(replace(p, objects_stored=sizes.get(p.peer_id, 0)) for p in self.peers)
        )
