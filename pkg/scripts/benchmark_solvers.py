#!/usr/bin/env python3
"""Run the standard four-solver comparison on a shipped config.

Thin wrapper over ``infmax experiment`` that also prints a per-algorithm
summary table.
"""

import argparse
import collections

import numpy as np

from infmax.harness import ExperimentConfig, run_experiment


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", required=True, help="TOML experiment config")
    ap.add_argument("--out", help="also write the rows to this CSV")
    ap.add_argument("--seed", type=int)
    args = ap.parse_args()

    config = ExperimentConfig.from_toml(args.config)
    if args.seed is not None:
        from dataclasses import replace
        config = replace(config, master_seed=args.seed)
    if args.out:
        from dataclasses import replace
        config = replace(config, out=args.out)
    config = config.with_env_overrides()

    rows = run_experiment(config)
    by_algo = collections.defaultdict(list)
    for row in rows:
        by_algo[(row.n, row.algorithm)].append(row.influence_mean)
    print(f"{'n':>6} {'algorithm':>10} {'mean':>10} {'sd over trials':>15}")
    for (n, algo), vals in sorted(by_algo.items()):
        print(f"{n:>6} {algo:>10} {np.mean(vals):>10.2f} {np.std(vals):>15.2f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
