"""Batch experiment harness: configs, per-trial pipelines, CSV results.

One experiment = a network family, a sample budget, and a solver grid.  Each
trial builds (or redraws) the network, draws samples, runs the from-samples
solvers plus the bracketing baselines, scores every chosen set with a
ground-truth Monte Carlo evaluation, and appends one CSV row per algorithm.
Everything is derived from one master seed, so reruns (at any thread count)
reproduce the CSV byte for byte.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import Optional, Sequence, Union

import numpy as np

from .baselines import OracleBudget, run_greedy, run_random
from .cascade import InfluenceEstimate, influence_mc
from .graphs import CommunityLayout, WeightedGraph, generate_er, generate_pa, \
    generate_sbm, load_edge_list
from .rng import STREAM_EXPERIMENT, seed_sequence
from .sampling import MODE_FIXED, MODE_REDRAWN, draw_samples, uniform_expected_k, \
    validate_mode_source
from .solver import SolverConfig, run_cops, run_margi

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

CSV_HEADER = "config,algorithm,trial,n,k,alpha,m,influence_mean,influence_stderr,wall_ms,chosen"

# role tags for per-trial child seeds
_ROLE_LAYOUT = 0
_ROLE_GRAPH = 1
_ROLE_SAMPLES = 2
_ROLE_GREEDY = 3
_ROLE_RANDOM = 4
_ROLE_EVAL = 5

ENV_SEED = "INFMAX_SEED"
ENV_THREADS = "INFMAX_THREADS"


def make_default_q(graph: WeightedGraph) -> float:
    """Uniform cascade weight giving expected live degree about 1.

    With q = n / (2|E|), the expected number of live edges is n/2, i.e. the
    average live degree is 1.  Clamped to 1 for sparse graphs.
    """
    if graph.num_edges == 0:
        raise ValueError("default weight needs a graph with at least one edge")
    return min(1.0, graph.n / (2.0 * graph.num_edges))


def evaluate_solution(source: Union[WeightedGraph, CommunityLayout], mode: str,
                      seeds, realizations: int, rng_seed: int) -> InfluenceEstimate:
    """Ground-truth influence of a chosen seed set.

    Fixed mode redraws only the cascade on the given graph; redrawn mode
    redraws the block-model graph and the cascade for every realization.
    """
    validate_mode_source(source, mode)
    return influence_mc(source, seeds, realizations, rng_seed)


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment grid: network family, sampling budget, solver settings.

    ``network`` is one of "sbm1" (one large community plus geometric-size
    small ones, redrawn per trial), "sbm2" (fixed number of equal
    communities), "er", "pa", or a path to an edge-list file.  ``n`` may be a
    single node count or a schedule (list).  ``q_ic`` overrides the cascade
    edge weight; left at None it defaults to the split rule for block models
    and to the average-live-degree-1 rule otherwise.
    """

    network: str
    n: Union[int, Sequence[int]] = 400
    k: int = 10
    alpha: float = 0.5
    m: int = 50_000
    trials: int = 10
    eval_realizations: int = 2_000
    master_seed: int = 0
    mode: str = "auto"            # auto | fixed | redrawn
    q_ic: Optional[float] = None
    sbm_q_sb: Optional[float] = None
    sbm1_large_fraction: float = 0.25
    sbm1_small_mean_fraction: float = 1.0 / 40.0
    sbm2_communities: int = 10
    er_degree: float = 1.5        # edge prob er_degree / n
    pa_edges_per_node: int = 2
    file_default_q: Optional[float] = None
    file_degree_min: int = 0
    file_candidate_degree_min: int = 0
    min_count: int = 30
    with_greedy: bool = True
    greedy_realizations: int = 200
    threads: int = 1
    record_walltime: bool = False
    out: Optional[str] = None

    def __post_init__(self):
        for name in ("k", "m", "trials", "eval_realizations", "greedy_realizations",
                     "threads", "min_count", "sbm2_communities", "pa_edges_per_node"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1")
        for nn in self.schedule:
            if nn < 1:
                raise ValueError("n must be >= 1")
        if not (0.0 <= self.alpha <= 1.0):
            raise ValueError("alpha must lie in [0, 1]")
        if self.mode not in ("auto", MODE_FIXED, MODE_REDRAWN):
            raise ValueError(f"mode must be auto/fixed/redrawn, got {self.mode!r}")
        if self.is_file and not os.path.exists(self.network):
            raise ValueError(f"network file not found: {self.network}")

    @property
    def schedule(self) -> list:
        return [int(x) for x in (self.n if isinstance(self.n, (list, tuple)) else [self.n])]

    @property
    def is_file(self) -> bool:
        return self.network not in ("sbm1", "sbm2", "er", "pa")

    @property
    def sample_mode(self) -> str:
        if self.mode != "auto":
            return self.mode
        return MODE_REDRAWN if self.network in ("sbm1", "sbm2") else MODE_FIXED

    def digest(self) -> str:
        payload = asdict(self)
        payload.pop("out", None)
        payload.pop("threads", None)
        payload.pop("record_walltime", None)
        blob = json.dumps(payload, sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()[:12]

    @classmethod
    def from_toml(cls, path) -> "ExperimentConfig":
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
        unknown = set(data) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise ValueError(f"{path}: unknown config keys {sorted(unknown)}")
        return cls(**data)

    def with_env_overrides(self) -> "ExperimentConfig":
        """Apply INFMAX_SEED / INFMAX_THREADS environment overrides."""
        changes = {}
        if os.environ.get(ENV_SEED):
            changes["master_seed"] = int(os.environ[ENV_SEED])
        if os.environ.get(ENV_THREADS):
            changes["threads"] = int(os.environ[ENV_THREADS])
        return replace(self, **changes) if changes else self


@dataclass(frozen=True)
class ResultRow:
    config: str
    algorithm: str
    trial: int
    n: int
    k: int
    alpha: float
    m: int
    influence_mean: float
    influence_stderr: float
    wall_ms: int
    chosen: tuple

    def to_csv(self) -> str:
        chosen = ";".join(str(c) for c in self.chosen)
        return (f"{self.config},{self.algorithm},{self.trial},{self.n},{self.k},"
                f"{self.alpha!r},{self.m},{self.influence_mean!r},"
                f"{self.influence_stderr!r},{self.wall_ms},{chosen}")


def _child_seed(master: int, *key: int) -> int:
    return int(seed_sequence(master, STREAM_EXPERIMENT, *key).generate_state(1, np.uint64)[0])


def dense_split_probs(sizes) -> tuple:
    """Per-community (q_sb, q_ic) from the dense-threshold rule.

    The joint live-edge probability is set to min(1, 3 ln s / s) and split
    evenly between the structural and cascade stages (q_sb = q_ic = sqrt(p)).
    Size-1 communities get probability 0 (they have no pairs).
    """
    q_sb, q_ic = [], []
    for s in sizes:
        s = int(s)
        p = min(1.0, 3.0 * math.log(s) / s) if s >= 2 else 0.0
        q_sb.append(math.sqrt(p))
        q_ic.append(math.sqrt(p))
    return np.asarray(q_sb), np.asarray(q_ic)


def sbm1_sizes(n: int, rng: np.random.Generator, large_fraction: float = 0.25,
               small_mean_fraction: float = 1.0 / 40.0) -> list:
    """One large community plus geometric-size small ones summing to n."""
    large = max(1, int(round(n * large_fraction)))
    remaining = n - large
    mean_small = max(1.0, n * small_mean_fraction)
    sizes = [large]
    while remaining > 0:
        s = min(int(rng.geometric(1.0 / mean_small)), remaining)
        sizes.append(s)
        remaining -= s
    return sizes


def sbm2_sizes(n: int, communities: int) -> list:
    """Fixed community count, sizes as equal as n allows."""
    base = n // communities
    if base < 1:
        raise ValueError(f"n={n} too small for {communities} communities")
    sizes = [base] * communities
    for i in range(n - base * communities):
        sizes[i] += 1
    return sizes


def _layout_probs(config: ExperimentConfig, sizes) -> tuple:
    ncomm = len(sizes)
    if config.sbm_q_sb is not None and config.q_ic is not None:
        return np.full(ncomm, config.sbm_q_sb), np.full(ncomm, config.q_ic)
    q_sb, q_ic = dense_split_probs(sizes)
    # a single explicit stage keeps the rule's joint probability and shifts
    # the other stage to compensate
    if config.q_ic is not None:
        p = q_sb * q_ic
        q_ic = np.full(ncomm, config.q_ic)
        with np.errstate(divide="ignore", invalid="ignore"):
            q_sb = np.where(q_ic > 0, np.minimum(1.0, p / q_ic), 0.0)
    elif config.sbm_q_sb is not None:
        p = q_sb * q_ic
        q_sb = np.full(ncomm, config.sbm_q_sb)
        with np.errstate(divide="ignore", invalid="ignore"):
            q_ic = np.where(q_sb > 0, np.minimum(1.0, p / q_sb), 0.0)
    return q_sb, q_ic


def _build_source(config: ExperimentConfig, n: int, n_idx: int, trial: int):
    """Network (or layout) for one trial, plus the solver candidate set."""
    if config.network == "sbm1":
        rng = np.random.default_rng(
            seed_sequence(config.master_seed, STREAM_EXPERIMENT, n_idx, trial, _ROLE_LAYOUT))
        sizes = sbm1_sizes(n, rng, config.sbm1_large_fraction,
                           config.sbm1_small_mean_fraction)
    elif config.network == "sbm2":
        sizes = sbm2_sizes(n, config.sbm2_communities)
    else:
        sizes = None
    graph_seed = _child_seed(config.master_seed, n_idx, trial, _ROLE_GRAPH)
    if sizes is not None:
        q_sb, q_ic = _layout_probs(config, sizes)
        layout = CommunityLayout.from_sizes(sizes, q_sb, q_ic)
        if config.sample_mode == MODE_REDRAWN:
            return layout, None
        graph, _ = generate_sbm(layout, graph_seed)
        return graph, None
    if config.network == "er":
        p = min(1.0, config.er_degree / n)
        graph = generate_er(n, p, 1.0, graph_seed)
        return _with_weight(graph, config.q_ic), None
    if config.network == "pa":
        graph = generate_pa(n, config.pa_edges_per_node, 1.0, graph_seed)
        return _with_weight(graph, config.q_ic), None
    # file-backed network: same graph every trial
    default_q = config.file_default_q if config.file_default_q is not None else 1.0
    graph, candidates = load_edge_list(config.network, default_q,
                                       config.file_degree_min,
                                       config.file_candidate_degree_min)
    if config.file_default_q is None:
        graph = _with_weight(graph, config.q_ic)
    return graph, candidates


def _with_weight(graph: WeightedGraph, q_ic: Optional[float]) -> WeightedGraph:
    q = q_ic if q_ic is not None else make_default_q(graph)
    return WeightedGraph(graph.n, graph.edge_u, graph.edge_v,
                         np.full(graph.num_edges, q),
                         original_ids=graph.original_ids)


def _run_trial(config: ExperimentConfig, n: int, n_idx: int, trial: int) -> list:
    source, candidates = _build_source(config, n, n_idx, trial)
    mode = config.sample_mode
    real_n = source.n
    dist = uniform_expected_k(real_n, config.k)
    samples = draw_samples(source, dist, config.m, mode,
                           _child_seed(config.master_seed, n_idx, trial, _ROLE_SAMPLES))
    solver_cfg = SolverConfig(k=config.k, alpha=config.alpha,
                              min_count=config.min_count, candidates=candidates)
    results = []
    timings = {}

    def timed(name, fn):
        t0 = time.perf_counter()
        res = fn()
        timings[name] = int((time.perf_counter() - t0) * 1000)
        return res

    results.append(timed("cops", lambda: run_cops(samples, solver_cfg)))
    results.append(timed("margi", lambda: run_margi(samples, solver_cfg)))
    results.append(timed("random", lambda: run_random(
        candidates if candidates is not None else real_n, config.k,
        _child_seed(config.master_seed, n_idx, trial, _ROLE_RANDOM))))
    if config.with_greedy:
        budget = OracleBudget(realizations_per_eval=config.greedy_realizations)
        results.append(timed("greedy", lambda: run_greedy(
            source, mode, config.k, budget,
            _child_seed(config.master_seed, n_idx, trial, _ROLE_GREEDY),
            candidates=candidates)))

    eval_seed = _child_seed(config.master_seed, n_idx, trial, _ROLE_EVAL)
    digest = config.digest()
    rows = []
    for res in results:
        est = evaluate_solution(source, mode, res.chosen,
                                config.eval_realizations, eval_seed)
        rows.append(ResultRow(
            config=digest, algorithm=res.algorithm, trial=trial, n=real_n,
            k=config.k, alpha=config.alpha, m=config.m,
            influence_mean=est.mean, influence_stderr=est.std_error,
            wall_ms=timings[res.algorithm] if config.record_walltime else 0,
            chosen=tuple(res.chosen)))
    return rows


def run_experiment(config: ExperimentConfig) -> list:
    """Run the full trial grid; returns rows and writes CSV when configured.

    Trials run concurrently when ``threads`` > 1; rows are ordered by
    (schedule position, trial, algorithm) regardless of scheduling, and the
    CSV is byte-identical for a fixed master seed at any thread count
    (wall_ms is recorded only when ``record_walltime`` is set, since real
    timings are inherently non-reproducible).
    """
    tasks = [(n_idx, n, trial)
             for n_idx, n in enumerate(config.schedule)
             for trial in range(config.trials)]
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            futures = [pool.submit(_run_trial, config, n, n_idx, trial)
                       for n_idx, n, trial in tasks]
            per_task = [f.result() for f in futures]
    else:
        per_task = [_run_trial(config, n, n_idx, trial)
                    for n_idx, n, trial in tasks]
    rows = [row for task_rows in per_task for row in task_rows]
    if config.out:
        write_csv(rows, config.out)
    return rows


def write_csv(rows, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in rows:
            fh.write(row.to_csv() + "\n")
