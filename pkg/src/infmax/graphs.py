"""Random network generation and real-network ingestion.

Produces community-structured block-model graphs, Erdos-Renyi and
preferential-attachment graphs, and loads SNAP-style edge lists.  Everything
is normalized into a :class:`WeightedGraph`: undirected simple graph whose
edges carry an independent activation probability used by the cascade
simulator.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .rng import generator

logger = logging.getLogger(__name__)

# Communities up to this size sample intra-community edges by per-pair
# Bernoulli draws; larger ones switch to geometric skip sampling.
PAIRWISE_LIMIT = 10_000

# Per-pair Bernoulli draws are chunked to bound peak memory.
_CHUNK_PAIRS = 1 << 22

_MAX_NODE_ID = 2**31 - 1


def _as_prob(x, name: str):
    x = np.asarray(x, dtype=np.float64)
    if np.any(~np.isfinite(x)) or np.any(x < 0.0) or np.any(x > 1.0):
        raise ValueError(f"{name} must lie in [0, 1], got {x!r}")
    return x


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected simple graph with per-edge activation probabilities.

    Nodes are dense integer indices 0..n-1.  Edges are stored canonically:
    endpoint arrays with edge_u < edge_v, sorted lexicographically.  Arrays
    are frozen after construction so graphs can be shared across threads.
    """

    n: int
    edge_u: np.ndarray
    edge_v: np.ndarray
    edge_q: np.ndarray
    # Original node labels when loaded from a file (index -> external id).
    original_ids: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"node count must be nonnegative, got {self.n}")
        u = np.asarray(self.edge_u, dtype=np.int32)
        v = np.asarray(self.edge_v, dtype=np.int32)
        q = _as_prob(self.edge_q, "edge activation probability")
        if not (u.shape == v.shape == q.shape) or u.ndim != 1:
            raise ValueError("edge arrays must be 1-d and of equal length")
        if u.size:
            if u.min(initial=0) < 0 or max(u.max(initial=0), v.max(initial=0)) >= self.n:
                raise ValueError("edge endpoint out of range")
            if np.any(u == v):
                raise ValueError("self-loops are not allowed")
            lo, hi = np.minimum(u, v), np.maximum(u, v)
            order = np.lexsort((hi, lo))
            u, v, q = lo[order], hi[order], q[order]
            key = u.astype(np.int64) * self.n + v
            if np.any(key[1:] == key[:-1]):
                raise ValueError("duplicate edges (up to orientation) are not allowed")
        for name, arr in (("edge_u", u), ("edge_v", v), ("edge_q", q)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def num_edges(self) -> int:
        return int(self.edge_u.size)

    @property
    def edges(self) -> list:
        """Edge list as (u, v, q) tuples."""
        return [
            (int(u), int(v), float(q))
            for u, v, q in zip(self.edge_u, self.edge_v, self.edge_q)
        ]

    def degrees(self) -> np.ndarray:
        deg = np.bincount(self.edge_u, minlength=self.n)
        deg += np.bincount(self.edge_v, minlength=self.n)
        return deg


@dataclass(frozen=True)
class CommunityLayout:
    """Partition of nodes into communities plus per-community edge probabilities.

    ``q_sb`` is the structural (block-model) intra-community edge probability,
    ``q_ic`` the cascade activation probability assigned to intra-community
    edges; their product ``p`` is the probability that an intra-community pair
    ends up live in a joint structural+cascade realization.  ``q_inter`` and
    ``q_ic_inter`` play the same roles for cross-community pairs and both
    default to 0 (no inter-community edges).
    """

    assignment: np.ndarray
    q_sb: np.ndarray
    q_ic: np.ndarray
    q_inter: float = 0.0
    q_ic_inter: float = 0.0

    def __post_init__(self):
        a = np.asarray(self.assignment, dtype=np.int32)
        if a.ndim != 1 or a.size < 1:
            raise ValueError("assignment must be a nonempty 1-d array")
        q_sb = np.atleast_1d(_as_prob(self.q_sb, "q_sb"))
        q_ic = np.atleast_1d(_as_prob(self.q_ic, "q_ic"))
        ncomm = int(a.max()) + 1
        if a.min() < 0:
            raise ValueError("community indices must be nonnegative")
        if q_sb.size == 1:
            q_sb = np.full(ncomm, q_sb[0])
        if q_ic.size == 1:
            q_ic = np.full(ncomm, q_ic[0])
        if q_sb.size != ncomm or q_ic.size != ncomm:
            raise ValueError(
                f"need one q_sb/q_ic per community ({ncomm}), "
                f"got {q_sb.size}/{q_ic.size}"
            )
        if np.any(np.bincount(a, minlength=ncomm) == 0):
            raise ValueError("every community index up to the max must be used")
        _as_prob(self.q_inter, "q_inter")
        _as_prob(self.q_ic_inter, "q_ic_inter")
        for name, arr in (("assignment", a), ("q_sb", q_sb), ("q_ic", q_ic)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @classmethod
    def from_sizes(cls, sizes: Sequence[int], q_sb, q_ic,
                   q_inter: float = 0.0, q_ic_inter: float = 0.0) -> "CommunityLayout":
        """Contiguous layout: community c occupies the next sizes[c] node ids."""
        sizes = np.asarray(sizes, dtype=np.int64)
        if sizes.size < 1 or np.any(sizes < 1):
            raise ValueError(f"community sizes must be positive, got {sizes!r}")
        assignment = np.repeat(np.arange(sizes.size, dtype=np.int32), sizes)
        return cls(assignment, np.asarray(q_sb), np.asarray(q_ic), q_inter, q_ic_inter)

    @property
    def n(self) -> int:
        return int(self.assignment.size)

    @property
    def num_communities(self) -> int:
        return int(self.q_sb.size)

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.num_communities)

    @property
    def p(self) -> np.ndarray:
        """Per-community joint live-edge probability q_sb * q_ic."""
        return self.q_sb * self.q_ic

    @property
    def communities(self) -> list:
        """Per-community (size, q_sb, q_ic) tuples."""
        return [
            (int(s), float(sb), float(ic))
            for s, sb, ic in zip(self.sizes, self.q_sb, self.q_ic)
        ]

    def members(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == c).astype(np.int32)


@dataclass(frozen=True)
class RegimeLabel:
    """Per-community density regime, classified with margin ``epsilon``."""

    labels: tuple
    epsilon: float

    DENSE = "dense"
    TIGHT = "tight"
    LOOSE = "loose"
    BORDERLINE = "borderline"


def classify_regimes(layout: CommunityLayout, epsilon: float) -> RegimeLabel:
    """Label each community dense / tight / loose / borderline.

    A community of size s with live-edge probability p is dense when
    p > 3 ln(s) / s, tight when p >= (1 + epsilon) / s, loose when
    p <= (1 - epsilon) / s, and borderline otherwise.  Dense communities
    also satisfy the tight threshold (for any realistic size), so dense
    takes precedence.
    """
    if not (0.0 < epsilon < 1.0):
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    labels = []
    for s, p in zip(layout.sizes, layout.p):
        s = int(s)
        if p > 3.0 * math.log(s) / s:
            labels.append(RegimeLabel.DENSE)
        elif p >= (1.0 + epsilon) / s:
            labels.append(RegimeLabel.TIGHT)
        elif p <= (1.0 - epsilon) / s:
            labels.append(RegimeLabel.LOOSE)
        else:
            labels.append(RegimeLabel.BORDERLINE)
    return RegimeLabel(tuple(labels), float(epsilon))


# ---------------------------------------------------------------------------
# pair sampling


def _decode_triangular(t: np.ndarray, s: int):
    """Map linear indices to (i, j) pairs of the upper triangle of an s x s grid.

    Index order is row-major: (0,1),(0,2),...,(0,s-1),(1,2),...
    """
    t = t.astype(np.float64)
    i = np.floor((2 * s - 1 - np.sqrt((2 * s - 1) ** 2 - 8 * t)) / 2).astype(np.int64)
    # guard against float rounding at row boundaries
    row_start = i * (2 * s - i - 1) // 2
    too_big = row_start > t.astype(np.int64)
    i[too_big] -= 1
    row_start = i * (2 * s - i - 1) // 2
    next_start = (i + 1) * (2 * s - i - 2) // 2
    too_small = t.astype(np.int64) >= next_start
    i[too_small] += 1
    row_start = i * (2 * s - i - 1) // 2
    j = t.astype(np.int64) - row_start + i + 1
    return i, j


def _bernoulli_indices(num: int, p: float, rng: np.random.Generator,
                       method: str = "auto") -> np.ndarray:
    """Indices of successes among ``num`` independent Bernoulli(p) trials.

    ``method`` picks the sampling strategy: "pairwise" draws one uniform per
    trial (chunked), "skip" draws geometric gaps between successes.  Both
    produce the same distribution; "auto" uses pairwise for small index
    spaces and skip above PAIRWISE_LIMIT-sized communities' pair counts.
    """
    if num <= 0 or p <= 0.0:
        return np.empty(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(num, dtype=np.int64)
    if method == "auto":
        method = "pairwise" if num <= PAIRWISE_LIMIT * (PAIRWISE_LIMIT - 1) // 2 else "skip"
    if method == "pairwise":
        out = []
        for start in range(0, num, _CHUNK_PAIRS):
            stop = min(start + _CHUNK_PAIRS, num)
            hits = np.flatnonzero(rng.random(stop - start) < p)
            if hits.size:
                out.append(hits.astype(np.int64) + start)
        return np.concatenate(out) if out else np.empty(0, dtype=np.int64)
    if method == "skip":
        # positions are partial sums of iid Geometric(p) gaps
        expected = int(num * p)
        buf = []
        pos = -1
        while True:
            draw = max(1024, int(1.1 * (expected - len(buf))) + 16)
            gaps = rng.geometric(p, size=draw)
            pts = pos + np.cumsum(gaps)
            past = np.searchsorted(pts, num)
            buf.extend(pts[:past].tolist())
            if past < pts.size:
                break
            pos = int(pts[-1])
        return np.asarray(buf, dtype=np.int64)
    raise ValueError(f"unknown sampling method {method!r}")


def _sample_pairs_within(members: np.ndarray, p: float, rng: np.random.Generator,
                         method: str = "auto"):
    """Sample unordered pairs among ``members`` independently with prob p."""
    s = members.size
    if s < 2:
        return np.empty(0, np.int32), np.empty(0, np.int32)
    idx = _bernoulli_indices(s * (s - 1) // 2, p, rng, method=method)
    i, j = _decode_triangular(idx, s)
    return members[i], members[j]


def _sample_pairs_between(mem_a: np.ndarray, mem_b: np.ndarray, p: float,
                          rng: np.random.Generator, method: str = "auto"):
    """Sample pairs across two disjoint member sets independently with prob p."""
    a, b = mem_a.size, mem_b.size
    if a == 0 or b == 0:
        return np.empty(0, np.int32), np.empty(0, np.int32)
    idx = _bernoulli_indices(a * b, p, rng, method=method)
    i, j = np.divmod(idx, b)
    return mem_a[i], mem_b[j]


# ---------------------------------------------------------------------------
# generators


def generate_sbm(layout: CommunityLayout, rng_seed: int,
                 method: str = "auto"):
    """Draw a block-model graph: intra-community pairs become edges with their
    community's q_sb (cascade weight q_ic), cross-community pairs with
    q_inter (cascade weight q_ic_inter).

    Cross-community edges are omitted entirely when their cascade weight is 0
    (they could never transmit anything).  Returns (graph, layout).
    """
    rng = generator(rng_seed)
    us, vs, qs = [], [], []
    for c in range(layout.num_communities):
        u, v = _sample_pairs_within(layout.members(c), float(layout.q_sb[c]), rng,
                                    method=method)
        us.append(u)
        vs.append(v)
        qs.append(np.full(u.size, layout.q_ic[c]))
    if layout.q_inter > 0.0 and layout.q_ic_inter > 0.0:
        for ci in range(layout.num_communities):
            for cj in range(ci + 1, layout.num_communities):
                u, v = _sample_pairs_between(layout.members(ci), layout.members(cj),
                                             layout.q_inter, rng, method=method)
                us.append(u)
                vs.append(v)
                qs.append(np.full(u.size, layout.q_ic_inter))
    graph = WeightedGraph(layout.n, np.concatenate(us), np.concatenate(vs),
                          np.concatenate(qs))
    return graph, layout


def generate_er(n: int, p: float, q_ic: float, rng_seed: int,
                method: str = "auto") -> WeightedGraph:
    """G(n, p) random graph with uniform cascade weight q_ic."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    _as_prob(p, "p")
    _as_prob(q_ic, "q_ic")
    rng = generator(rng_seed)
    u, v = _sample_pairs_within(np.arange(n, dtype=np.int32), float(p), rng,
                                method=method)
    return WeightedGraph(n, u, v, np.full(u.size, q_ic))


def generate_pa(n: int, edges_per_node: int, q_ic: float, rng_seed: int) -> WeightedGraph:
    """Preferential attachment graph with uniform cascade weight q_ic.

    Bootstrap is a clique on the first edges_per_node + 1 nodes; every later
    node attaches edges_per_node edges to distinct existing nodes chosen with
    probability proportional to current degree.  Total edge count is therefore
    exactly n*m - m*(m+1)/2 for m = edges_per_node.
    """
    if edges_per_node < 1 or n <= edges_per_node:
        raise ValueError(
            f"need n > edges_per_node >= 1, got n={n}, edges_per_node={edges_per_node}"
        )
    _as_prob(q_ic, "q_ic")
    m = int(edges_per_node)
    rng = generator(rng_seed)
    total_edges = n * m - m * (m + 1) // 2
    eu = np.empty(total_edges, dtype=np.int32)
    ev = np.empty(total_edges, dtype=np.int32)
    # endpoint multiset: node x appears deg(x) times, drives degree-biased picks
    ends = np.empty(2 * total_edges, dtype=np.int32)
    k = 0
    fill = 0
    for i in range(m + 1):
        for j in range(i + 1, m + 1):
            eu[k], ev[k] = i, j
            ends[fill], ends[fill + 1] = i, j
            k += 1
            fill += 2
    for t in range(m + 1, n):
        picked = set()
        while len(picked) < m:
            cand = int(ends[rng.integers(fill)])
            if cand not in picked:
                picked.add(cand)
        for tgt in sorted(picked):
            eu[k], ev[k] = tgt, t
            ends[fill], ends[fill + 1] = tgt, t
            k += 1
            fill += 2
    return WeightedGraph(n, eu, ev, np.full(total_edges, q_ic))


# ---------------------------------------------------------------------------
# edge-list files


def _parse_edge_lines(path):
    """Yield (lineno, u, v, q_or_None) from an edge-list file."""
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            toks = line.split()
            if len(toks) not in (2, 3):
                raise ValueError(f"{path}: line {lineno}: expected 2 or 3 fields, got {len(toks)}")
            try:
                u, v = int(toks[0]), int(toks[1])
            except ValueError as exc:
                raise ValueError(f"{path}: line {lineno}: non-integer node id") from exc
            if u < 0 or v < 0:
                raise ValueError(f"{path}: line {lineno}: negative node id")
            if u > _MAX_NODE_ID or v > _MAX_NODE_ID:
                raise ValueError(f"{path}: line {lineno}: node id overflows 32-bit range")
            q = None
            if len(toks) == 3:
                try:
                    q = float(toks[2])
                except ValueError as exc:
                    raise ValueError(f"{path}: line {lineno}: bad weight field") from exc
            yield lineno, u, v, q


def _read_header_n(path) -> Optional[int]:
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if not line.startswith("#"):
                return None
            for tok in line[1:].split():
                if tok.startswith("n="):
                    try:
                        return int(tok[2:])
                    except ValueError:
                        return None
    return None


def load_edge_list(path, default_q: float, degree_min: int = 0,
                   candidate_degree_min: int = 0):
    """Load a SNAP-style edge list and prune low-degree nodes.

    Lines starting with '#' are comments; duplicate edges (up to orientation)
    are merged; self-loops are dropped (a warning reports how many).  Nodes
    with degree <= degree_min are removed in a single pass (not iterated to a
    fixpoint), the rest are reindexed densely in increasing original-id order.
    Edge weights come from a third column when present, otherwise default_q.

    Returns (graph, candidates) where candidates are the new ids of nodes
    whose post-pruning degree is >= candidate_degree_min.  The graph keeps
    the original ids in ``graph.original_ids``.
    """
    _as_prob(default_q, "default_q")
    us, vs, qs = [], [], []
    self_loops = 0
    for _lineno, u, v, q in _parse_edge_lines(path):
        if u == v:
            self_loops += 1
            continue
        us.append(min(u, v))
        vs.append(max(u, v))
        qs.append(default_q if q is None else q)
    if self_loops:
        logger.warning("%s: dropped %d self-loop(s)", path, self_loops)
    header_n = _read_header_n(path)
    u = np.asarray(us, dtype=np.int64)
    v = np.asarray(vs, dtype=np.int64)
    q = np.asarray(qs, dtype=np.float64)
    if u.size:
        key = u * (_MAX_NODE_ID + 1) + v
        _, first = np.unique(key, return_index=True)
        first.sort()
        u, v, q = u[first], v[first], q[first]
    node_ids = np.unique(np.concatenate([u, v])) if u.size else np.empty(0, np.int64)
    if header_n is not None and (node_ids.size == 0 or header_n > node_ids.size):
        # header may declare isolated nodes beyond those appearing on edges
        declared = np.arange(header_n, dtype=np.int64)
        node_ids = np.unique(np.concatenate([node_ids, declared])) if node_ids.size else declared
    if node_ids.size == 0:
        raise ValueError(f"{path}: no edges or nodes found")
    dense = np.searchsorted(node_ids, u), np.searchsorted(node_ids, v)
    deg = np.bincount(dense[0], minlength=node_ids.size)
    deg += np.bincount(dense[1], minlength=node_ids.size)
    keep = deg > degree_min
    kept_ids = node_ids[keep]
    remap = np.full(node_ids.size, -1, dtype=np.int64)
    remap[keep] = np.arange(keep.sum())
    eu, ev = remap[dense[0]], remap[dense[1]]
    good = (eu >= 0) & (ev >= 0)
    graph = WeightedGraph(int(keep.sum()), eu[good], ev[good], q[good],
                          original_ids=kept_ids)
    new_deg = graph.degrees()
    candidates = np.flatnonzero(new_deg >= candidate_degree_min).tolist()
    return graph, candidates


def save_edge_list(graph: WeightedGraph, path, weighted: bool = True) -> None:
    """Write the edge-list format: header '# n=<n> weighted=<0|1>', one edge
    per line, optional third column with the activation probability."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# n={graph.n} weighted={1 if weighted else 0}\n")
        if weighted:
            for u, v, q in zip(graph.edge_u, graph.edge_v, graph.edge_q):
                fh.write(f"{u} {v} {float(q)!r}\n")
        else:
            for u, v in zip(graph.edge_u, graph.edge_v):
                fh.write(f"{u} {v}\n")


def load_communities(path, n: Optional[int] = None) -> np.ndarray:
    """Read 'node_id community_id' pairs into an assignment array."""
    pairs = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            toks = line.split()
            if len(toks) != 2:
                raise ValueError(f"{path}: line {lineno}: expected 2 fields")
            try:
                node, comm = int(toks[0]), int(toks[1])
            except ValueError as exc:
                raise ValueError(f"{path}: line {lineno}: non-integer field") from exc
            pairs[node] = comm
    if not pairs:
        raise ValueError(f"{path}: empty community file")
    size = (max(pairs) + 1) if n is None else n
    assignment = np.full(size, -1, dtype=np.int32)
    for node, comm in pairs.items():
        if node >= size:
            raise ValueError(f"{path}: node id {node} out of range for n={size}")
        assignment[node] = comm
    if np.any(assignment < 0):
        raise ValueError(f"{path}: some nodes have no community assignment")
    return assignment


def save_communities(assignment: np.ndarray, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for node, comm in enumerate(assignment):
            fh.write(f"{node} {int(comm)}\n")
