"""Compiled inner loops for cascade simulation.

Every kernel works on a batch of live-edge realizations at once: the caller
draws a uniform matrix of shape (batch, n_edges) and the kernel treats edge
e of realization b as live when u[b, e] < p[e], computing per-realization
connected components with a size-weighted union-find and aggregating
whatever the caller needs (influenced counts, per-candidate marginal gains,
exact subset enumeration).

Kept free of package imports so numba caching stays cheap.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True, inline="always")
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    # path compression
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@njit(cache=True, nogil=True, inline="always")
def _union_live(parent, size, edge_u, edge_v, u_row, p):
    for e in range(edge_u.shape[0]):
        if u_row[e] < p[e]:
            ru = _find(parent, edge_u[e])
            rv = _find(parent, edge_v[e])
            if ru != rv:
                if size[ru] < size[rv]:
                    ru, rv = rv, ru
                parent[rv] = ru
                size[ru] += size[rv]


@njit(cache=True, nogil=True)
def influenced_counts_per_row_seeds(n, edge_u, edge_v, uniforms, p, seed_rows):
    """Influenced count per realization, seeds varying per row.

    uniforms: (B, E) float64, seed_rows: (B, n) bool.  Returns int64 (B,).
    """
    B = uniforms.shape[0]
    out = np.empty(B, np.int64)
    parent = np.empty(n, np.int32)
    size = np.empty(n, np.int64)
    stamp = np.full(n, -1, np.int64)
    for b in range(B):
        for i in range(n):
            parent[i] = i
            size[i] = 1
        _union_live(parent, size, edge_u, edge_v, uniforms[b], p)
        total = 0
        for i in range(n):
            if seed_rows[b, i]:
                r = _find(parent, i)
                if stamp[r] != b:
                    stamp[r] = b
                    total += size[r]
        out[b] = total
    return out


@njit(cache=True, nogil=True)
def influenced_counts_fixed_seeds(n, edge_u, edge_v, uniforms, p, seed_idx):
    """Influenced count per realization for one fixed seed set (node indices)."""
    B = uniforms.shape[0]
    out = np.empty(B, np.int64)
    parent = np.empty(n, np.int32)
    size = np.empty(n, np.int64)
    stamp = np.full(n, -1, np.int64)
    for b in range(B):
        for i in range(n):
            parent[i] = i
            size[i] = 1
        _union_live(parent, size, edge_u, edge_v, uniforms[b], p)
        total = 0
        for j in range(seed_idx.shape[0]):
            r = _find(parent, seed_idx[j])
            if stamp[r] != b:
                stamp[r] = b
                total += size[r]
        out[b] = total
    return out


@njit(cache=True, nogil=True)
def greedy_gain_sums(n, edge_u, edge_v, uniforms, p, seed_idx):
    """Per-candidate marginal gain sums over a batch of realizations.

    For each realization, marks the components already covered by
    ``seed_idx``; a candidate's gain in that realization is the size of its
    component if uncovered, else 0.  Returns (base_sum, gains_sum) where
    base_sum is the summed influenced count of the current seed set and
    gains_sum[a] sums candidate a's marginal gains over the batch.
    """
    B = uniforms.shape[0]
    parent = np.empty(n, np.int32)
    size = np.empty(n, np.int64)
    covered = np.zeros(n, np.bool_)
    gains = np.zeros(n, np.float64)
    base = 0.0
    for b in range(B):
        for i in range(n):
            parent[i] = i
            size[i] = 1
            covered[i] = False
        _union_live(parent, size, edge_u, edge_v, uniforms[b], p)
        for j in range(seed_idx.shape[0]):
            r = _find(parent, seed_idx[j])
            if not covered[r]:
                covered[r] = True
                base += size[r]
        for a in range(n):
            r = _find(parent, a)
            if not covered[r]:
                gains[a] += size[r]
    return base, gains


@njit(cache=True, nogil=True)
def exact_expected_influence(n, edge_u, edge_v, q, seed_idx):
    """Expected influenced count by exhaustive enumeration of edge subsets.

    Iterates all 2^E live-edge patterns, weighting each by its product
    probability.  Caller guards E; 2^25 is the practical ceiling.
    """
    E = edge_u.shape[0]
    parent = np.empty(n, np.int32)
    size = np.empty(n, np.int64)
    seen = np.zeros(n, np.bool_)
    total = 0.0
    for mask in range(1 << E):
        prob = 1.0
        for i in range(n):
            parent[i] = i
            size[i] = 1
        for e in range(E):
            if mask & (1 << e):
                prob *= q[e]
                ru = _find(parent, edge_u[e])
                rv = _find(parent, edge_v[e])
                if ru != rv:
                    if size[ru] < size[rv]:
                        ru, rv = rv, ru
                    parent[rv] = ru
                    size[ru] += size[rv]
            else:
                prob *= 1.0 - q[e]
        if prob == 0.0:
            continue
        count = 0
        for j in range(seed_idx.shape[0]):
            r = _find(parent, seed_idx[j])
            if not seen[r]:
                seen[r] = True
                count += size[r]
        for j in range(seed_idx.shape[0]):
            seen[_find(parent, seed_idx[j])] = False
        total += prob * count
    return total


@njit(cache=True, nogil=True)
def exact_miss_weights(n, edge_u, edge_v, q):
    """Accumulate P(pattern) * |component| onto the component's complement mask.

    Returns h of length 2^n with h[M] = sum over edge patterns and components
    c of prob(pattern) * |c| for all c whose node set is disjoint from ~M,
    i.e. c's complement bitmask is M.  A superset sum over h then gives, for
    every seed bitmask S, the expected number of nodes NOT influenced by S;
    the caller turns that into an expected-influence table over all 2^n seed
    sets.  Caller guards n and E.
    """
    E = edge_u.shape[0]
    full = (1 << n) - 1
    h = np.zeros(1 << n, np.float64)
    parent = np.empty(n, np.int32)
    size = np.empty(n, np.int64)
    comp_mask = np.empty(n, np.int64)
    for mask in range(1 << E):
        prob = 1.0
        for i in range(n):
            parent[i] = i
            size[i] = 1
        for e in range(E):
            if mask & (1 << e):
                prob *= q[e]
                ru = _find(parent, edge_u[e])
                rv = _find(parent, edge_v[e])
                if ru != rv:
                    if size[ru] < size[rv]:
                        ru, rv = rv, ru
                    parent[rv] = ru
                    size[ru] += size[rv]
            else:
                prob *= 1.0 - q[e]
        if prob == 0.0:
            continue
        for i in range(n):
            comp_mask[i] = 0
        for i in range(n):
            comp_mask[_find(parent, i)] |= 1 << i
        for i in range(n):
            if parent[i] == i:
                h[full & ~comp_mask[i]] += prob * size[i]
    return h
