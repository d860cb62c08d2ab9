"""Fetch-size policies.

Besides the four fixed baselines there is the basic heuristic, a uniform
fetch size derived from the number of relevant peers and k, and the
enhanced heuristic, which scales the basic size per peer by five weights
in ``[1, 2]``.

Arithmetic is done on :class:`fractions.Fraction` so that ceilings are
exact; float inputs (speeds, rates, consFactor) convert to fractions
without loss.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .model import AditError
from .network import NetworkProfile, PeerProfile


class UnknownPolicyError(AditError, ValueError):
    pass


class PolicyKind(enum.Enum):
    FIXED_1 = "fixed1"
    FIXED_K = "fixedk"
    CEIL_K_OVER_N = "ceil"
    FLOOR_K_OVER_N = "floor"
    BASIC = "basic"
    ENHANCED = "enhanced"
    # constant fetch size, used by the optimum sweep
    UNIFORM = "uniform"


@dataclass(frozen=True)
class HeuristicPolicy:
    kind: PolicyKind
    cons_factor: float = 2.0
    size: int | None = None

    def __post_init__(self):
        if not self.cons_factor > 0:
            raise ValueError("cons_factor must be > 0")
        if self.kind is PolicyKind.UNIFORM and (self.size is None or self.size < 1):
            raise ValueError("a uniform policy needs size >= 1")

    @classmethod
    def parse(cls, name: str, cons_factor: float = 2.0) -> "HeuristicPolicy":
        """Policy from its short name, e.g. ``"enhanced"`` or ``"uniform:8"``."""
        name = name.strip().lower()
        if name.startswith("uniform:"):
            return cls(PolicyKind.UNIFORM, cons_factor, int(name.split(":", 1)[1]))
        try:
            return cls(PolicyKind(name), cons_factor)
        except ValueError:
            raise UnknownPolicyError(f"unknown policy {name!r}") from None

    @property
    def name(self) -> str:
        if self.kind is PolicyKind.UNIFORM:
            return f"uniform:{self.size}"
        return self.kind.value


@dataclass
class PeerQueryState:
    """Per-query progress of one peer, as seen by the coordinator."""

    objects_retrieved: int = 0
    objects_published: int = 0
    remaining_bound: float = 1.0
    exhausted: bool = False
    msg_count: int = 0
    last_object_id: int | None = None


class Weights(NamedTuple):
    published_fraction: Fraction
    used_fraction: Fraction
    db_fraction: Fraction
    speed: Fraction
    trans_rate: Fraction

    def product(self) -> Fraction:
        out = Fraction(1)
        for w in self:
            out *= w
        return out


def _ratio_weight(num, den) -> Fraction:
    # zero denominator (e.g. nothing published yet) gives the neutral weight
    if den == 0:
        return Fraction(1)
    return 1 + Fraction(num) / Fraction(den)


def basic_fetch_size(k: int, n_size: int, cons_factor: float = 2.0) -> int:
    """Uniform fetch size ``min(k, ceil(cons * ceil(N/k) * k / N))``, at least 1."""
    if k < 1 or n_size < 1:
        raise ValueError("k and n_size must be >= 1")
    multiple = -(-n_size // k)
    f = Fraction(cons_factor) * multiple * k / n_size
    return max(1, min(k, math.ceil(f)))


def compute_weights(
    state: PeerQueryState,
    profile: PeerProfile,
    network: NetworkProfile,
    obj_pub_n: int,
) -> Weights:
    return Weights(
        _ratio_weight(state.objects_published, obj_pub_n),
        _ratio_weight(state.objects_published, state.objects_retrieved),
        _ratio_weight(profile.objects_stored, network.objects_stored_n),
        _ratio_weight(profile.speed, network.max_speed_n),
        _ratio_weight(profile.trans_rate_mbit, network.max_trans_rate_n),
    )


def enhanced_fetch_size(f: int, weights, k: int, obj_pub_n: int) -> int:
    """``min(k - published, ceil(f * product(weights)))``."""
    if obj_pub_n > k:
        raise ValueError("more objects published than requested")
    scaled = Fraction(f)
    for w in weights:
        scaled *= Fraction(w)
    return min(k - obj_pub_n, math.ceil(scaled))


def fetch_size(
    policy: HeuristicPolicy,
    k: int,
    network: NetworkProfile,
    state: PeerQueryState,
    profile: PeerProfile,
    obj_pub_n: int,
    n_size: int | None = None,
) -> int:
    """Objects to request from one peer in the current iteration.

    ``n_size`` is the number of relevant peers this iteration and feeds the
    basic and enhanced heuristics; it defaults to the whole network.
    The ``k/N`` baselines always use the network size. While objects are
    missing the result lies in ``[1, k - obj_pub_n]``.
    """
    missing = k - obj_pub_n
    if missing <= 0:
        return 0
    n_network = network.n_size
    if n_size is None:
        n_size = n_network
    kind = policy.kind
    if kind is PolicyKind.FIXED_1:
        size = 1
    elif kind is PolicyKind.FIXED_K:
        size = k
    elif kind is PolicyKind.CEIL_K_OVER_N:
        size = -(-k // n_network)
    elif kind is PolicyKind.FLOOR_K_OVER_N:
        size = k // n_network
    elif kind is PolicyKind.BASIC:
        size = basic_fetch_size(k, n_size, policy.cons_factor)
    elif kind is PolicyKind.ENHANCED:
        f = basic_fetch_size(k, n_size, policy.cons_factor)
        size = enhanced_fetch_size(
            f, compute_weights(state, profile, network, obj_pub_n), k, obj_pub_n
        )
    elif kind is PolicyKind.UNIFORM:
        size = policy.size
    else:
        raise UnknownPolicyError(f"unknown policy kind {kind!r}")
    return max(1, min(missing, size))
