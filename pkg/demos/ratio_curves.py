"""
Ratio curves over k
===================

Sweeps k on a 19-peer network and reports, for every policy, how much
slower it answers than the enhanced heuristic (Ratio_QAT). With
matplotlib installed the curves are also written as SVG files.
"""

import sys
from pathlib import Path

from adit import ExperimentConfig, QuerySpec, run_benchmark
from adit.harness import plot_ratios

config = ExperimentConfig(
    seed=11,
    peer_count=19,
    per_peer_size_range=(1000, 10000),
    partition_strategy="shuffled",
    queries=[QuerySpec(k, 12) for k in (1, 5, 10, 20, 50, 100, 200)],
)
result = run_benchmark(config)

policies = list(dict.fromkeys(r["policy"] for r in result.rows))
print("k     " + "".join(f"{p:>10}" for p in policies))
for k in sorted({r["k"] for r in result.rows}):
    ratios = {r["policy"]: r["ratio_qat"] for r in result.rows if r["k"] == k}
    print(f"{k:<6}" + "".join(f"{ratios[p]:>10.2f}" for p in policies))

# ARTO pays for every object beyond its first parallel round with a
# sequential request, so its ratio climbs once k exceeds the peer count.
out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("ratio_curves")
try:
    for path in plot_ratios(result.rows, out):
        print("wrote", path)
except ImportError:
    print("matplotlib not installed, skipping plots")
