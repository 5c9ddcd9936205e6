"""Independent-cascade diffusion as random live-edge subgraphs.

A cascade realization keeps each edge independently with its activation
probability; the nodes influenced by a seed set are exactly the nodes
connected to it through live edges (valid because graphs are undirected).
Provides a single-realization view, a batched Monte Carlo estimator, and an
exhaustive-enumeration exact oracle for small instances.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import _engine
from .graphs import CommunityLayout, WeightedGraph
from .rng import BLOCK, STREAM_CASCADE, generator

EXACT_EDGE_LIMIT = 25
EXACT_TABLE_NODE_LIMIT = 20

# Memory budget for batched live-edge draws: floats per block.
_BLOCK_FLOAT_BUDGET = 16_000_000


@dataclass(frozen=True)
class CascadeRealization:
    """One live-edge draw with its connected-component structure."""

    graph: WeightedGraph
    live_edges: np.ndarray      # indices into the graph's edge arrays
    component_of: np.ndarray    # node -> component id
    component_size: np.ndarray  # component id -> size


@dataclass(frozen=True)
class InfluenceEstimate:
    """Monte Carlo estimate of an expected influenced count."""

    mean: float
    std_error: float
    realizations: int


def realize(graph: WeightedGraph, rng_seed: int) -> CascadeRealization:
    """Draw one cascade realization: keep each edge with its probability."""
    rng = generator(rng_seed)
    live = np.flatnonzero(rng.random(graph.num_edges) < graph.edge_q)
    adj = csr_matrix(
        (np.ones(live.size, dtype=np.int8),
         (graph.edge_u[live], graph.edge_v[live])),
        shape=(graph.n, graph.n),
    )
    ncomp, labels = connected_components(adj, directed=False)
    sizes = np.bincount(labels, minlength=ncomp)
    return CascadeRealization(graph, live, labels, sizes)


def _seed_index(n: int, seeds: Iterable[int]) -> np.ndarray:
    idx = np.asarray(sorted(set(int(s) for s in seeds)), dtype=np.int64)
    if idx.size and (idx[0] < 0 or idx[-1] >= n):
        raise ValueError(f"seed node out of range [0, {n})")
    return idx


def influenced_count(real: CascadeRealization, seeds: Iterable[int]) -> int:
    """Number of nodes connected to the seed set in this realization."""
    idx = _seed_index(real.graph.n, seeds)
    if idx.size == 0:
        return 0
    comps = np.unique(real.component_of[idx])
    return int(real.component_size[comps].sum())


class _PairSpace:
    """Edge-probability view shared by the batched Monte Carlo loops.

    For a fixed graph this is just its edge arrays.  For a community layout
    it enumerates every intra-community pair with live probability
    q_sb * q_ic (structural draw and cascade draw fused into one Bernoulli,
    which has the same joint law), plus cross-community pairs when both
    inter probabilities are positive.
    """

    def __init__(self, n, edge_u, edge_v, p_live):
        self.n = int(n)
        self.edge_u = np.ascontiguousarray(edge_u, dtype=np.int32)
        self.edge_v = np.ascontiguousarray(edge_v, dtype=np.int32)
        self.p_live = np.ascontiguousarray(p_live, dtype=np.float64)
        self._buf = None

    @property
    def rows_per_block(self) -> int:
        per_row = max(1, self.p_live.size)
        return max(1, min(BLOCK, _BLOCK_FLOAT_BUDGET // per_row))

    def draw_uniforms(self, rng: np.random.Generator, rows: int) -> np.ndarray:
        """(rows, E) uniforms into a reused buffer; edge e is live in row b
        when the returned matrix satisfies u[b, e] < p_live[e]."""
        if self._buf is None:
            self._buf = np.empty((self.rows_per_block, self.p_live.size))
        out = self._buf[:rows]
        rng.random(out=out)
        return out


def pair_space(source: Union[WeightedGraph, CommunityLayout]) -> _PairSpace:
    if isinstance(source, WeightedGraph):
        return _PairSpace(source.n, source.edge_u, source.edge_v, source.edge_q)
    if isinstance(source, CommunityLayout):
        us, vs, ps = [], [], []
        for c in range(source.num_communities):
            members = source.members(c)
            if members.size < 2:
                continue
            i, j = np.triu_indices(members.size, k=1)
            us.append(members[i])
            vs.append(members[j])
            ps.append(np.full(i.size, source.p[c]))
        p_inter = source.q_inter * source.q_ic_inter
        if p_inter > 0.0:
            for ci in range(source.num_communities):
                for cj in range(ci + 1, source.num_communities):
                    ma, mb = source.members(ci), source.members(cj)
                    i, j = np.meshgrid(np.arange(ma.size), np.arange(mb.size),
                                       indexing="ij")
                    us.append(ma[i.ravel()])
                    vs.append(mb[j.ravel()])
                    ps.append(np.full(i.size, p_inter))
        if us:
            return _PairSpace(source.n, np.concatenate(us), np.concatenate(vs),
                              np.concatenate(ps))
        return _PairSpace(source.n, np.empty(0, np.int32), np.empty(0, np.int32),
                          np.empty(0, np.float64))
    raise TypeError(f"expected WeightedGraph or CommunityLayout, got {type(source)!r}")


def _mc_counts(space: _PairSpace, seed_idx: np.ndarray, realizations: int,
               rng_seed: int, stream: int) -> np.ndarray:
    """Influenced counts over ``realizations`` independent live-edge draws."""
    counts = np.empty(realizations, dtype=np.int64)
    rows_cap = space.rows_per_block
    blk = 0
    start = 0
    while start < realizations:
        rows = min(rows_cap, realizations - start)
        rng = generator(rng_seed, stream, blk)
        uniforms = space.draw_uniforms(rng, rows)
        counts[start:start + rows] = _engine.influenced_counts_fixed_seeds(
            space.n, space.edge_u, space.edge_v, uniforms, space.p_live, seed_idx)
        start += rows
        blk += 1
    return counts


def influence_mc(graph: Union[WeightedGraph, CommunityLayout], seeds: Iterable[int],
                 realizations: int, rng_seed: int) -> InfluenceEstimate:
    """Monte Carlo expected influenced count over independent realizations.

    Accepts a fixed graph (cascade redrawn per realization) or a community
    layout (structural graph and cascade jointly redrawn per realization).
    """
    if realizations < 1:
        raise ValueError(f"realizations must be >= 1, got {realizations}")
    space = pair_space(graph)
    idx = _seed_index(space.n, seeds)
    counts = _mc_counts(space, idx, realizations, rng_seed, STREAM_CASCADE)
    mean = float(counts.mean())
    if realizations == 1:
        warnings.warn("influence_mc with a single realization has no error estimate")
        return InfluenceEstimate(mean, 0.0, 1)
    std_error = float(counts.std(ddof=1) / np.sqrt(realizations))
    return InfluenceEstimate(mean, std_error, int(realizations))


def influence_exact(graph: WeightedGraph, seeds: Iterable[int]) -> float:
    """Exact expected influenced count by enumerating all live-edge patterns.

    Exhaustive over 2^|E| subsets; refuses graphs with more than
    EXACT_EDGE_LIMIT edges.
    """
    if graph.num_edges > EXACT_EDGE_LIMIT:
        raise ValueError(
            f"exact oracle needs <= {EXACT_EDGE_LIMIT} edges, "
            f"graph has {graph.num_edges}"
        )
    idx = _seed_index(graph.n, seeds)
    if idx.size == 0:
        return 0.0
    return float(_engine.exact_expected_influence(
        graph.n, graph.edge_u, graph.edge_v, graph.edge_q, idx))


def influence_exact_table(graph: WeightedGraph) -> np.ndarray:
    """Exact expected influence for every seed set, indexed by node bitmask.

    Returns an array f of length 2^n with f[mask] the expected influenced
    count of the seed set encoded by mask.  Built from one pass over all
    live-edge patterns: each pattern's components contribute their size to
    every seed set that misses them, collected with a superset-sum transform.
    """
    if graph.num_edges > EXACT_EDGE_LIMIT:
        raise ValueError(
            f"exact oracle needs <= {EXACT_EDGE_LIMIT} edges, "
            f"graph has {graph.num_edges}"
        )
    if graph.n > EXACT_TABLE_NODE_LIMIT:
        raise ValueError(
            f"exact table needs <= {EXACT_TABLE_NODE_LIMIT} nodes, "
            f"graph has {graph.n}"
        )
    n = graph.n
    missed = _engine.exact_miss_weights(n, graph.edge_u, graph.edge_v, graph.edge_q)
    # superset sum: missed[S] <- sum over M >= S of the accumulated weights
    idx = np.arange(1 << n)
    for b in range(n):
        clear = (idx & (1 << b)) == 0
        missed[clear] += missed[idx[clear] | (1 << b)]
    f = n - missed
    f[0] = 0.0
    return f


def seed_mask(seeds: Iterable[int]) -> int:
    """Bitmask index into influence_exact_table for a seed set."""
    mask = 0
    for s in set(int(x) for x in seeds):
        mask |= 1 << s
    return mask
