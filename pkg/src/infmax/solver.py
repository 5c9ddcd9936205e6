"""Seed selection from samples by overlap pruning.

Ranks nodes by first-order marginal contribution, walks the ranking while
discarding every node whose contribution overlaps an earlier survivor's by
at least the allowed factor (detected through second-order contributions),
and returns the first k survivors.  The no-pruning variant of the same
ranking is the comparison baseline.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .estimators import MarginalTable, first_order
from .sampling import SampleSet


class SolverError(RuntimeError):
    """No usable estimates to rank (e.g. every node flagged insufficient)."""


@dataclass(frozen=True)
class SolverConfig:
    k: int
    alpha: float = 0.5
    min_count: int = 30
    candidates: Optional[Sequence[int]] = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not (0.0 <= self.alpha <= 1.0):
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")


@dataclass
class SolverResult:
    """Chosen seed set plus full provenance of the selection."""

    algorithm: str
    chosen: list                 # <= k nodes, in ranking order
    ordering: list               # (node, estimate or None) ranked best-first
    pruned: list                 # (node, blocking survivor, v_b estimate or None)
    backfilled: list             # nodes re-admitted to fill up to k
    insufficient_pairs: list = field(default_factory=list)  # overlap queries with no data
    config: Optional[SolverConfig] = None

    def to_json(self, max_ordering: Optional[int] = None) -> str:
        k = self.config.k if self.config else len(self.chosen)
        cut = 5 * k if max_ordering is None else max_ordering
        payload = {
            "algorithm": self.algorithm,
            "chosen": [int(x) for x in self.chosen],
            "ordering": [[int(a), None if v is None else float(v)]
                         for a, v in self.ordering[:cut]],
            "pruned": [[int(a), int(b), None if v is None else float(v)]
                       for a, b, v in self.pruned],
            "backfilled": [int(x) for x in self.backfilled],
            "insufficient_pairs": [[int(a), int(b)] for a, b in self.insufficient_pairs],
            "config": None if self.config is None else {
                "k": self.config.k,
                "alpha": self.config.alpha,
                "min_count": self.config.min_count,
                "candidates": None if self.config.candidates is None
                              else [int(c) for c in self.config.candidates],
            },
        }
        return json.dumps(payload, indent=2)


def overlap(table: MarginalTable, a: int, b: int, alpha: float) -> bool:
    """True when a's contribution to sets containing b collapses below
    (1 - alpha) times its unconditional contribution.

    Degenerate rules: a nonpositive first-order estimate overlaps with
    everything (it should never displace a positive one); a second-order
    query without sufficient data reports no overlap (pruning on no evidence
    is the riskier error).  The second-order estimate is floored at 0 before
    comparing - the estimand is a nonnegative marginal gain, and the floor
    makes alpha = 1 disable pruning exactly.
    """
    if a == b:
        raise ValueError("overlap needs two distinct nodes")
    if not (0.0 <= alpha <= 1.0):
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    fo = table.v1(a)
    if fo.insufficient:
        raise ValueError(f"first-order estimate for node {a} unavailable")
    if fo.estimate <= 0.0:
        return True
    so = table.second_order(a, b)
    if so.insufficient:
        return False
    return max(so.estimate, 0.0) < (1.0 - alpha) * fo.estimate


def ranked_order(table: MarginalTable, candidates: Sequence[int]) -> list:
    """Candidates ranked best-first: positive estimates descending, then
    nonpositive estimates descending, then insufficient-data nodes; ties by
    ascending node id throughout."""
    cands = np.asarray(sorted(set(int(c) for c in candidates)), dtype=np.int64)
    if cands.size == 0:
        raise ValueError("candidate set must be nonempty")
    if cands[0] < 0 or cands[-1] >= table.n:
        raise ValueError("candidate node out of range")
    est = table.estimates[cands]
    flagged = table.insufficient[cands]
    tier = np.where(flagged, 2, np.where(np.nan_to_num(est) > 0.0, 0, 1))
    sort_est = np.where(flagged, 0.0, np.nan_to_num(est))
    order = np.lexsort((cands, -sort_est, tier))
    return [int(c) for c in cands[order]]


def _scan(table: MarginalTable, ordering: list, alpha: float):
    """Single pass over the ranking, pruning against earlier survivors."""
    survivors, pruned, insufficient_pairs = [], [], []
    for a in ordering:
        fo = table.v1(a)
        degenerate = fo.insufficient or fo.estimate <= 0.0
        blocker = None
        blocker_vb = None
        if degenerate:
            if survivors:
                blocker = survivors[0]
                so = table.second_order(a, blocker)
                blocker_vb = so.estimate
        else:
            for b in survivors:
                so = table.second_order(a, b)
                if so.insufficient:
                    insufficient_pairs.append((a, b))
                    continue
                if max(so.estimate, 0.0) < (1.0 - alpha) * fo.estimate:
                    blocker = b
                    blocker_vb = so.estimate
                    break
        if blocker is None:
            survivors.append(a)
        else:
            pruned.append((a, blocker, blocker_vb))
    return survivors, pruned, insufficient_pairs


def _prepare(sampleset: SampleSet, config: SolverConfig):
    table = first_order(sampleset, min_count=config.min_count)
    candidates = (range(table.n) if config.candidates is None
                  else config.candidates)
    ordering = ranked_order(table, candidates)
    if config.k > len(ordering):
        raise ValueError(f"k={config.k} exceeds candidate count {len(ordering)}")
    if bool(table.insufficient[ordering].all()):
        raise SolverError("every candidate node has insufficient data")
    return table, ordering


def run_cops(sampleset: SampleSet, config: SolverConfig) -> SolverResult:
    """Rank by first-order contribution, prune overlapping nodes, return the
    first k survivors.

    When fewer than k nodes survive, pruned nodes are re-admitted in ranking
    order (recorded in ``backfilled``) so the solver always returns k nodes.
    """
    table, ordering = _prepare(sampleset, config)
    survivors, pruned, insufficient_pairs = _scan(table, ordering, config.alpha)
    chosen = survivors[:config.k]
    backfilled = []
    if len(chosen) < config.k:
        backfilled = [a for a, _b, _v in pruned[:config.k - len(chosen)]]
        chosen = chosen + backfilled
        rank = {a: i for i, a in enumerate(ordering)}
        chosen.sort(key=rank.__getitem__)
    annotated = [(a, None if table.insufficient[a] else float(table.estimates[a]))
                 for a in ordering]
    return SolverResult("cops", chosen, annotated, pruned, backfilled,
                        insufficient_pairs, config)


def run_margi(sampleset: SampleSet, config: SolverConfig) -> SolverResult:
    """No-pruning baseline: the k nodes of highest first-order contribution."""
    table, ordering = _prepare(sampleset, config)
    chosen = ordering[:config.k]
    annotated = [(a, None if table.insufficient[a] else float(table.estimates[a]))
                 for a in ordering]
    return SolverResult("margi", chosen, annotated, [], [], [], config)
