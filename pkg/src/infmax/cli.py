"""Batch command-line interface.

Subcommands: ``gen`` (write a random network), ``sample`` (draw seed-set
samples), ``solve`` (run a solver on saved samples), ``eval`` (score a seed
set by Monte Carlo), ``experiment`` (full config-driven benchmark grid).
``INFMAX_SEED`` and ``INFMAX_THREADS`` environment variables override the
experiment seed and thread count.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import replace

import numpy as np

from .baselines import OracleBudget, run_greedy, run_random
from .graphs import CommunityLayout, generate_er, generate_pa, generate_sbm, \
    load_edge_list, save_communities, save_edge_list
from .harness import ENV_SEED, ENV_THREADS, ExperimentConfig, dense_split_probs, \
    evaluate_solution, make_default_q, run_experiment, sbm1_sizes, sbm2_sizes, \
    write_csv
from .rng import seed_sequence
from .sampling import MODE_FIXED, MODE_REDRAWN, draw_samples, load_samples, \
    save_samples, uniform_expected_k
from .solver import SolverConfig, run_cops, run_margi

logger = logging.getLogger(__name__)

_NETWORKS = ("sbm1", "sbm2", "er", "pa")


def _env_seed(args_seed):
    if os.environ.get(ENV_SEED):
        return int(os.environ[ENV_SEED])
    return args_seed


def _build_layout(args, seed: int) -> CommunityLayout:
    if args.network == "sbm1":
        rng = np.random.default_rng(seed_sequence(seed, 0))
        sizes = sbm1_sizes(args.n, rng)
    elif args.network == "sbm2":
        sizes = sbm2_sizes(args.n, args.sbm2_communities)
    else:
        raise SystemExit(f"--network {args.network} has no community layout")
    q_sb, q_ic = dense_split_probs(sizes)
    if args.q_ic is not None:
        p = q_sb * q_ic
        q_ic = np.full(len(sizes), args.q_ic)
        q_sb = np.where(q_ic > 0, np.minimum(1.0, p / np.where(q_ic > 0, q_ic, 1)), 0.0)
    return CommunityLayout.from_sizes(sizes, q_sb, q_ic)


def _cmd_gen(args) -> int:
    seed = _env_seed(args.seed)
    if args.network in ("sbm1", "sbm2"):
        layout = _build_layout(args, seed)
        graph, _ = generate_sbm(layout, seed)
        if args.communities_out:
            save_communities(layout.assignment, args.communities_out)
    elif args.network == "er":
        p = args.er_p if args.er_p is not None else min(1.0, args.er_degree / args.n)
        graph = generate_er(args.n, p, 1.0 if args.q_ic is None else args.q_ic, seed)
    elif args.network == "pa":
        graph = generate_pa(args.n, args.pa_m, 1.0 if args.q_ic is None else args.q_ic, seed)
    else:
        raise SystemExit(f"unknown network {args.network!r}")
    if args.network in ("er", "pa") and args.q_ic is None and graph.num_edges:
        q = make_default_q(graph)
        graph = replace(graph, edge_q=np.full(graph.num_edges, q))
    save_edge_list(graph, args.out, weighted=True)
    logger.info("wrote %s: n=%d edges=%d", args.out, graph.n, graph.num_edges)
    return 0


def _load_source(args, seed: int):
    """(source, mode, candidates) from --graph or --network arguments."""
    if getattr(args, "graph", None):
        graph, candidates = load_edge_list(
            args.graph, args.default_q,
            degree_min=args.degree_min,
            candidate_degree_min=args.candidate_degree_min)
        cands = candidates if args.candidate_degree_min > 0 else None
        return graph, MODE_FIXED, cands
    if getattr(args, "network", None):
        return _build_layout(args, seed), MODE_REDRAWN, None
    raise SystemExit("need --graph FILE or --network NAME")


def _cmd_sample(args) -> int:
    seed = _env_seed(args.seed)
    source, mode, _ = _load_source(args, seed)
    if args.mode != "auto":
        mode = args.mode
    dist = uniform_expected_k(source.n, args.k)
    ss = draw_samples(source, dist, args.m, mode, seed)
    save_samples(ss, args.out)
    logger.info("wrote %d samples (mode=%s) to %s", ss.m, mode, args.out)
    return 0


def _cmd_solve(args) -> int:
    seed = _env_seed(args.seed)
    if args.algo in ("cops", "margi", "random"):
        if not args.samples:
            raise SystemExit(f"--algo {args.algo} needs --samples FILE")
        ss = load_samples(args.samples)
    cfg = SolverConfig(k=args.k, alpha=args.alpha, min_count=args.min_count)
    if args.algo == "cops":
        result = run_cops(ss, cfg)
    elif args.algo == "margi":
        result = run_margi(ss, cfg)
    elif args.algo == "random":
        result = run_random(ss.n, args.k, seed)
    elif args.algo == "greedy":
        source, mode, cands = _load_source(args, seed)
        budget = OracleBudget(realizations_per_eval=args.realizations)
        result = run_greedy(source, mode, args.k, budget, seed, candidates=cands)
    else:
        raise SystemExit(f"unknown algorithm {args.algo!r}")
    payload = result.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
    else:
        print(payload)
    return 0


def _cmd_eval(args) -> int:
    seed = _env_seed(args.seed)
    source, mode, _ = _load_source(args, seed)
    if args.mode != "auto":
        mode = args.mode
    seeds = [int(x) for x in args.seeds.split(";") if x != ""]
    est = evaluate_solution(source, mode, seeds, args.realizations, seed)
    out = {"mean": est.mean, "std_error": est.std_error,
           "realizations": est.realizations, "seeds": seeds}
    print(json.dumps(out))
    return 0


def _cmd_experiment(args) -> int:
    config = ExperimentConfig.from_toml(args.config)
    overrides = {}
    for name in ("k", "alpha", "m", "trials", "threads", "out"):
        val = getattr(args, name)
        if val is not None:
            overrides[name] = val
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if overrides:
        config = replace(config, **overrides)
    config = config.with_env_overrides()
    rows = run_experiment(config)
    if not config.out:
        from .harness import CSV_HEADER
        print(CSV_HEADER)
        for row in rows:
            print(row.to_csv())
    logger.info("experiment done: %d rows", len(rows))
    return 0


def _add_network_args(sub, include_graph: bool = True):
    if include_graph:
        sub.add_argument("--graph", help="edge-list file (fixed-graph mode)")
        sub.add_argument("--default-q", type=float, default=0.1,
                         help="edge weight for unweighted files")
        sub.add_argument("--degree-min", type=int, default=0)
        sub.add_argument("--candidate-degree-min", type=int, default=0)
    sub.add_argument("--network", choices=_NETWORKS, help="synthetic network family")
    sub.add_argument("--n", type=int, default=400)
    sub.add_argument("--q-ic", type=float, default=None, dest="q_ic")
    sub.add_argument("--sbm2-communities", type=int, default=10)
    sub.add_argument("--er-p", type=float, default=None)
    sub.add_argument("--er-degree", type=float, default=1.5)
    sub.add_argument("--pa-m", type=int, default=2)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="infmax",
                                     description="influence maximization from samples")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a network and save it")
    _add_network_args(p, include_graph=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--communities-out")
    p.set_defaults(fn=_cmd_gen)

    p = sub.add_parser("sample", help="draw (seed set, influence) samples")
    _add_network_args(p)
    p.add_argument("--k", type=int, default=10, help="expected seed-set size")
    p.add_argument("--m", type=int, required=True, help="number of samples")
    p.add_argument("--mode", choices=("auto", MODE_FIXED, MODE_REDRAWN), default="auto")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_sample)

    p = sub.add_parser("solve", help="run a solver")
    p.add_argument("--algo", choices=("cops", "margi", "random", "greedy"), required=True)
    p.add_argument("--samples", help="sample CSV (cops/margi/random)")
    _add_network_args(p)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--min-count", type=int, default=30)
    p.add_argument("--realizations", type=int, default=200,
                   help="greedy oracle budget per evaluation")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("eval", help="score a seed set by Monte Carlo")
    _add_network_args(p)
    p.add_argument("--seeds", required=True, help="semicolon-separated node ids")
    p.add_argument("--mode", choices=("auto", MODE_FIXED, MODE_REDRAWN), default="auto")
    p.add_argument("--realizations", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_eval)

    p = sub.add_parser("experiment", help="run a config-driven benchmark")
    p.add_argument("--config", required=True, help="TOML experiment config")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
