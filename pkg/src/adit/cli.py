"""Command line entry point: ``python -m adit {run,bench,verify,oracle}``."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .config import ExperimentConfig, QuerySpec
from .harness import (
    OracleMismatch,
    brute_force_top_k,
    build_network,
    generate_query,
    plot_ratios,
    run_benchmark,
    run_policy,
    write_metadata,
)
from .model import AditError

EXIT_ERROR = 1
EXIT_MISMATCH = 2


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="experiment config (JSON)")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--peers", type=int, help="override the peer count")
    common.add_argument("--k", type=int, help="number of objects searched")
    common.add_argument("--policy", help="policy name, or comma separated list for bench/verify")
    common.add_argument("--restrictions", type=int, default=4, help="restrictions per query (run/oracle)")
    common.add_argument("--out", type=Path, help="output path")
    common.add_argument("--plot", action="store_true", help="also write SVG ratio charts")

    parser = argparse.ArgumentParser(prog="adit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="run one query and print top-k and metrics")
    sub.add_parser("bench", parents=[common], help="run the policy sweep and write CSV")
    sub.add_parser("verify", parents=[common], help="bench with brute-force cross-check")
    sub.add_parser("oracle", parents=[common], help="brute-force top-k only")
    return parser


def _load_config(args) -> ExperimentConfig:
    config = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.peers is not None:
        changes["peer_count"] = args.peers
    if args.policy and args.command in ("bench", "verify"):
        changes["policies"] = [p.strip() for p in args.policy.split(",") if p.strip()]
    if args.k is not None and args.command in ("bench", "verify"):
        counts = dict.fromkeys(q.restriction_count for q in config.queries)
        changes["queries"] = [QuerySpec(args.k, m) for m in counts]
    return replace(config, **changes) if changes else config


def _print_results(results, out) -> None:
    print(f"{'rank':>4}  {'peer':>4}  {'object':>10}  score", file=out)
    for i, r in enumerate(results, start=1):
        print(f"{i:>4}  {r.origin_peer:>4}  {r.object_id:>10}  {r.score:.6f}", file=out)


def _single_query(config: ExperimentConfig, args):
    network = build_network(config)
    k = args.k if args.k is not None else 10
    query = generate_query(network, k, args.restrictions, config.seed, config.query_targets)
    return network, query


def cmd_run(config: ExperimentConfig, args, out) -> int:
    network, query = _single_query(config, args)
    policy = args.policy or "enhanced"
    res = run_policy(network, query, policy, config)
    _print_results(res.results, out)
    print(file=out)
    print(f"policy        {res.policy}", file=out)
    print(f"iterations    {res.iterations}", file=out)
    print(f"messages      {res.messages}", file=out)
    print(f"objects_moved {res.objects_moved}", file=out)
    print(f"se_seconds    {res.system_effort!r}", file=out)
    print(f"qat_seconds   {res.query_answer_time!r}", file=out)
    if res.short:
        print("short_result  true (fewer than k objects in the network)", file=out)
    return 0


def cmd_oracle(config: ExperimentConfig, args, out) -> int:
    network, query = _single_query(config, args)
    _print_results(brute_force_top_k(network.stores, query), out)
    return 0


def cmd_bench(config: ExperimentConfig, args, out, verify: bool = False) -> int:
    result = run_benchmark(config, verify=verify)
    path = args.out or (None if verify else Path("results.csv"))
    if path is not None:
        result.write_csv(path)
        write_metadata(result, path.with_suffix(path.suffix + ".meta.json"))
        print(f"wrote {path} ({len(result.rows)} rows)", file=out)
        if args.plot:
            for svg in plot_ratios(result.rows, path.with_suffix("")):
                print(f"wrote {svg}", file=out)
    if verify:
        if result.mismatches:
            raise OracleMismatch(result.mismatches)
        print(f"verified {len(result.rows)} cells against the brute-force oracle", file=out)
    return 0


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = _parser().parse_args(argv)
    try:
        config = _load_config(args)
        if args.command == "run":
            return cmd_run(config, args, out)
        if args.command == "oracle":
            return cmd_oracle(config, args, out)
        return cmd_bench(config, args, out, verify=args.command == "verify")
    except OracleMismatch as exc:
        print("oracle mismatch:", file=sys.stderr)
        for cell in exc.cells:
            print(f"  {cell}", file=sys.stderr)
        return EXIT_MISMATCH
    except (AditError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
