"""
How the fetch-size heuristics react
===================================

Evaluates the basic and the enhanced fetch size on hand-made peer
profiles, without running any query.
"""

from adit import HeuristicPolicy, NetworkProfile, PeerProfile, PeerQueryState, PolicyKind, fetch_size

# Two peers at opposite ends of the capability scale.
small_slow = PeerProfile(0, 1_000, speed=1.0, trans_rate_mbit=2.0, msg_cost_seconds=0.1, object_size_bytes=136)
big_fast = PeerProfile(1, 20_000, speed=10.0, trans_rate_mbit=100.0, msg_cost_seconds=0.1, object_size_bytes=136)
network = NetworkProfile.of([small_slow, big_fast])

basic = HeuristicPolicy(PolicyKind.BASIC)
enhanced = HeuristicPolicy(PolicyKind.ENHANCED)

# In the first iteration nothing has been published, so only the static
# weights (share of data, speed, link rate) differ between the peers.
for k in (5, 20, 100):
    row = [fetch_size(basic, k, network, PeerQueryState(), small_slow, 0, n_size=10)]
    for p in (small_slow, big_fast):
        row.append(fetch_size(enhanced, k, network, PeerQueryState(), p, 0, n_size=10))
    print(f"k={k:>3}: basic {row[0]:>3}, enhanced small/slow {row[1]:>3}, big/fast {row[2]:>3}")

# Later iterations also reward peers whose objects made it into the
# answer: here the big peer supplied 30 of 40 published objects.
busy = PeerQueryState(objects_retrieved=40, objects_published=30, remaining_bound=0.7)
print("after feedback:", fetch_size(enhanced, 100, network, busy, big_fast, 40, n_size=10))
