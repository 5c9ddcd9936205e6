"""Seed-set sampling: the (seed set, observed influence) observation model.

Seed sets are drawn from a bounded product distribution; each sample's value
is the influenced count of a single fresh cascade realization, never a Monte
Carlo mean, so downstream estimators must cope with realization noise.  Two
modes: ``fixed`` keeps one graph and redraws only the cascade, ``redrawn``
redraws a block-model graph and the cascade for every sample.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field
from typing import Iterable, Union

import numpy as np

from . import _engine
from .cascade import pair_space
from .graphs import CommunityLayout, WeightedGraph
from .rng import STREAM_SAMPLES, generator

MODE_FIXED = "fixed"
MODE_REDRAWN = "redrawn"

# Marginals are clamped into [n^-3, 1 - n^-3]: bounded away from 0 and 1 by
# an inverse polynomial so both the containing and the missing sample class
# stay nonempty at practical sample counts.
BOUND_POWER = 3


def _bounds(n: int):
    # floor capped at 1/2 so the range stays well-formed even for n = 1
    lo = min(float(n) ** -BOUND_POWER, 0.5)
    return lo, 1.0 - lo


@dataclass(frozen=True)
class ProductDistribution:
    """Independent per-node inclusion probabilities, clamped into the bounded range."""

    marginals: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.marginals, dtype=np.float64).copy()
        if p.ndim != 1 or p.size < 1:
            raise ValueError("marginals must be a nonempty 1-d array")
        if np.any(~np.isfinite(p)) or np.any(p < 0.0) or np.any(p > 1.0):
            raise ValueError("marginals must lie in [0, 1]")
        lo, hi = _bounds(p.size)
        np.clip(p, lo, hi, out=p)
        p.flags.writeable = False
        object.__setattr__(self, "marginals", p)

    @property
    def n(self) -> int:
        return int(self.marginals.size)

    def digest(self) -> str:
        return hashlib.sha256(self.marginals.tobytes()).hexdigest()


def uniform_expected_k(n: int, k: int) -> ProductDistribution:
    """Product distribution with every marginal k/n (expected seed size k)."""
    if not (1 <= k <= n):
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    return ProductDistribution(np.full(n, k / n))


@dataclass(frozen=True)
class Sample:
    """One observation: a seed set and its realized influenced count."""

    seed_set: frozenset
    value: int


@dataclass(frozen=True)
class SampleSet:
    """Seed-set samples in matrix form plus provenance metadata."""

    seed_matrix: np.ndarray  # (m, n) bool
    values: np.ndarray       # (m,) int64
    mode: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        sm = np.asarray(self.seed_matrix, dtype=bool)
        vals = np.asarray(self.values, dtype=np.int64)
        if sm.ndim != 2 or sm.shape[0] < 1:
            raise ValueError("seed matrix must be (m, n) with m >= 1")
        if vals.shape != (sm.shape[0],):
            raise ValueError("values length must match sample count")
        if self.mode not in (MODE_FIXED, MODE_REDRAWN):
            raise ValueError(f"mode must be {MODE_FIXED!r} or {MODE_REDRAWN!r}")
        sizes = sm.sum(axis=1)
        if np.any(vals < sizes) or np.any(vals > sm.shape[1]):
            raise ValueError("sample values must lie in [|seed set|, n]")
        sm.flags.writeable = False
        vals.flags.writeable = False
        object.__setattr__(self, "seed_matrix", sm)
        object.__setattr__(self, "values", vals)

    @property
    def m(self) -> int:
        return int(self.values.size)

    @property
    def n(self) -> int:
        return int(self.seed_matrix.shape[1])

    @property
    def samples(self) -> list:
        return [
            Sample(frozenset(np.flatnonzero(row).tolist()), int(v))
            for row, v in zip(self.seed_matrix, self.values)
        ]

    def __len__(self) -> int:
        return self.m

    def __iter__(self):
        return iter(self.samples)

    def scaled(self, factor: float) -> "SampleSet":
        """Copy with values multiplied by a positive factor (rounded values
        are not required downstream, so this returns float-valued arrays)."""
        if factor <= 0:
            raise ValueError("scaling factor must be positive")
        out = object.__new__(SampleSet)
        object.__setattr__(out, "seed_matrix", self.seed_matrix)
        object.__setattr__(out, "values", self.values * float(factor))
        object.__setattr__(out, "mode", self.mode)
        object.__setattr__(out, "meta", dict(self.meta))
        return out


def validate_mode_source(source, mode: str) -> None:
    """Reject mismatched (source, mode) pairings."""
    if mode == MODE_REDRAWN and not isinstance(source, CommunityLayout):
        raise ValueError("redrawn mode needs a CommunityLayout source")
    if mode == MODE_FIXED and not isinstance(source, WeightedGraph):
        raise ValueError("fixed mode needs a WeightedGraph source")
    if mode not in (MODE_FIXED, MODE_REDRAWN):
        raise ValueError(f"unknown mode {mode!r}")


def draw_samples(source: Union[WeightedGraph, CommunityLayout],
                 dist: ProductDistribution, m: int, mode: str,
                 rng_seed: int) -> SampleSet:
    """Draw m independent (seed set, influenced count) samples.

    ``redrawn`` mode requires a CommunityLayout: every sample sees a fresh
    structural graph and cascade (the two Bernoulli stages are fused into one
    live-edge draw per pair, which has the same joint distribution).
    ``fixed`` mode requires a WeightedGraph: only the cascade is redrawn.
    Each block of samples consumes its own derived RNG stream, so output is
    reproducible and independent of any parallel scheduling.
    """
    if m < 1:
        raise ValueError(f"need m >= 1 samples, got {m}")
    validate_mode_source(source, mode)
    space = pair_space(source)
    n = space.n
    if dist.n != n:
        raise ValueError(f"distribution is over {dist.n} nodes, source has {n}")
    seed_matrix = np.empty((m, n), dtype=bool)
    values = np.empty(m, dtype=np.int64)
    rows_cap = space.rows_per_block
    start, blk = 0, 0
    while start < m:
        rows = min(rows_cap, m - start)
        rng = generator(rng_seed, STREAM_SAMPLES, blk)
        seeds = rng.random((rows, n)) < dist.marginals
        uniforms = space.draw_uniforms(rng, rows)
        counts = _engine.influenced_counts_per_row_seeds(
            n, space.edge_u, space.edge_v, uniforms, space.p_live, seeds)
        seed_matrix[start:start + rows] = seeds
        values[start:start + rows] = counts
        start += rows
        blk += 1
    meta = {
        "rng_seed": int(rng_seed),
        "n": n,
        "marginals_sha256": dist.digest(),
    }
    return SampleSet(seed_matrix, values, mode, meta)


def empirical_nonubiquity(sampleset: SampleSet, community: Iterable[int]) -> float:
    """Fraction of samples whose seed set misses the given community."""
    comm = np.asarray(sorted(set(int(c) for c in community)), dtype=np.int64)
    if comm.size == 0:
        raise ValueError("community must be nonempty")
    if comm[0] < 0 or comm[-1] >= sampleset.n:
        raise ValueError("community node out of range")
    hit = sampleset.seed_matrix[:, comm].any(axis=1)
    return float(1.0 - hit.mean())


# ---------------------------------------------------------------------------
# persistence: CSV of samples plus a JSON-lines metadata sidecar


def _sidecar_path(path) -> str:
    return f"{path}.meta.jsonl"


def save_samples(sampleset: SampleSet, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample_id", "value", "seeds"])
        for i in range(sampleset.m):
            nodes = np.flatnonzero(sampleset.seed_matrix[i])
            writer.writerow([i, int(sampleset.values[i]),
                             ";".join(str(x) for x in nodes)])
    record = {"mode": sampleset.mode, "m": sampleset.m, "n": sampleset.n}
    record.update(sampleset.meta)
    with open(_sidecar_path(path), "w", encoding="utf-8") as fh:
        fh.write(json.dumps(record, sort_keys=True) + "\n")


def load_samples(path) -> SampleSet:
    with open(_sidecar_path(path), "r", encoding="utf-8") as fh:
        meta = json.loads(fh.readline())
    n = int(meta.pop("n"))
    mode = meta.pop("mode")
    meta.pop("m", None)
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["sample_id", "value", "seeds"]:
            raise ValueError(f"{path}: unexpected sample CSV header {header!r}")
        for rec in reader:
            seeds = [int(x) for x in rec[2].split(";")] if rec[2] else []
            rows.append((int(rec[1]), seeds))
    seed_matrix = np.zeros((len(rows), n), dtype=bool)
    values = np.empty(len(rows), dtype=np.int64)
    for i, (val, seeds) in enumerate(rows):
        seed_matrix[i, seeds] = True
        values[i] = val
    meta["n"] = n
    return SampleSet(seed_matrix, values, mode, meta)
