"""Value-oracle Greedy and Random baselines.

Greedy gets Monte Carlo query access to the influence function itself (not
the sample set), which brackets the from-samples algorithms from above;
Random brackets them from below.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Union

import numpy as np

from . import _engine
from .cascade import influence_exact_table, pair_space
from .graphs import CommunityLayout, WeightedGraph
from .rng import STREAM_GREEDY, STREAM_RANDOM, generator
from .sampling import validate_mode_source
from .solver import SolverResult

# Re-check stream ids sit far above any realization block index.
_RECHECK_OFFSET = 1_000_000


@dataclass(frozen=True)
class OracleBudget:
    """Monte Carlo budget for one greedy value query.

    Candidate evaluations within an iteration share common random
    realizations, which cuts comparison variance (and makes ties behave
    differently than independent draws would).  The provisional winner and
    runner-up are re-evaluated on fresh realizations at ``recheck_factor``
    times the budget; the re-evaluation decides.
    """

    realizations_per_eval: int = 200
    recheck_factor: int = 4

    def __post_init__(self):
        if self.realizations_per_eval < 1:
            raise ValueError("realizations_per_eval must be >= 1")
        if self.recheck_factor < 1:
            raise ValueError("recheck_factor must be >= 1")


def _gain_sums(space, seed_idx, realizations, rng_seed, stream_key):
    """Accumulated (base, per-candidate gain) sums over shared realizations."""
    base = 0.0
    gains = np.zeros(space.n)
    rows_cap = space.rows_per_block
    start, blk = 0, 0
    while start < realizations:
        rows = min(rows_cap, realizations - start)
        rng = generator(rng_seed, STREAM_GREEDY, *stream_key, blk)
        uniforms = space.draw_uniforms(rng, rows)
        b, g = _engine.greedy_gain_sums(space.n, space.edge_u, space.edge_v,
                                        uniforms, space.p_live, seed_idx)
        base += b
        gains += g
        start += rows
        blk += 1
    return base, gains


def run_greedy(source: Union[WeightedGraph, CommunityLayout], mode: str, k: int,
               budget: OracleBudget, rng_seed: int,
               candidates: Optional[Iterable[int]] = None) -> SolverResult:
    """Greedy seed selection with a Monte Carlo value oracle.

    Each iteration evaluates every remaining candidate's marginal gain on a
    common batch of realizations and picks the argmax (ties by node id),
    subject to the re-check in :class:`OracleBudget`.
    """
    validate_mode_source(source, mode)
    space = pair_space(source)
    cands = (np.arange(space.n, dtype=np.int64) if candidates is None
             else np.asarray(sorted(set(int(c) for c in candidates)), dtype=np.int64))
    if cands.size == 0:
        raise ValueError("candidate set must be nonempty")
    if cands[0] < 0 or cands[-1] >= space.n:
        raise ValueError("candidate node out of range")
    if k > cands.size:
        raise ValueError(f"k={k} exceeds candidate count {cands.size}")
    chosen: list = []
    gains_log: list = []
    remaining = cands.copy()
    for it in range(k):
        seed_idx = np.asarray(chosen, dtype=np.int64)
        _, gain_sums = _gain_sums(space, seed_idx, budget.realizations_per_eval,
                                  rng_seed, (it,))
        cand_gains = gain_sums[remaining] / budget.realizations_per_eval
        best_pos = int(np.argmax(cand_gains))  # first max -> smallest id
        winner = int(remaining[best_pos])
        winner_gain = float(cand_gains[best_pos])
        if remaining.size >= 2 and budget.recheck_factor > 1:
            others = np.delete(cand_gains, best_pos)
            runner_pos = int(np.argmax(others))
            if runner_pos >= best_pos:
                runner_pos += 1
            runner = int(remaining[runner_pos])
            r = budget.recheck_factor * budget.realizations_per_eval
            _, re_sums = _gain_sums(space, seed_idx, r, rng_seed,
                                    (it, _RECHECK_OFFSET))
            g_w, g_r = re_sums[winner] / r, re_sums[runner] / r
            if g_r > g_w or (g_r == g_w and runner < winner):
                winner, winner_gain = runner, float(g_r)
            else:
                winner_gain = float(g_w)
        chosen.append(winner)
        gains_log.append((winner, winner_gain))
        remaining = remaining[remaining != winner]
    return SolverResult("greedy", chosen, gains_log, [], [], [])


def run_greedy_exact(graph: WeightedGraph, k: int,
                     candidates: Optional[Iterable[int]] = None) -> SolverResult:
    """Greedy against the exact enumeration oracle (small instances only)."""
    f = influence_exact_table(graph)
    cands = (list(range(graph.n)) if candidates is None
             else sorted(set(int(c) for c in candidates)))
    if not cands:
        raise ValueError("candidate set must be nonempty")
    if k > len(cands):
        raise ValueError(f"k={k} exceeds candidate count {len(cands)}")
    chosen: list = []
    gains_log: list = []
    mask = 0
    for _ in range(k):
        best, best_gain = None, -np.inf
        for a in cands:
            if a in chosen:
                continue
            gain = f[mask | (1 << a)] - f[mask]
            if gain > best_gain:
                best, best_gain = a, gain
        chosen.append(best)
        gains_log.append((best, float(best_gain)))
        mask |= 1 << best
    return SolverResult("greedy_exact", chosen, gains_log, [], [], [])


def run_random(candidates: Union[int, Iterable[int]], k: int,
               rng_seed: int) -> SolverResult:
    """Uniform k-subset of the candidates, without replacement."""
    if isinstance(candidates, (int, np.integer)):
        cands = np.arange(int(candidates), dtype=np.int64)
    else:
        cands = np.asarray(sorted(set(int(c) for c in candidates)), dtype=np.int64)
    if cands.size == 0:
        raise ValueError("candidate set must be nonempty")
    if k > cands.size:
        raise ValueError(f"k={k} exceeds candidate count {cands.size}")
    rng = generator(rng_seed, STREAM_RANDOM)
    chosen = rng.choice(cands, size=k, replace=False)
    return SolverResult("random", [int(c) for c in chosen],
                        [(int(c), None) for c in chosen], [], [], [])
