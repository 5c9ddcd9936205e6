"""Cascade realization, Monte Carlo estimation, and the exact oracle."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from infmax.cascade import (
    influence_exact,
    influence_exact_table,
    influence_mc,
    influenced_count,
    realize,
    seed_mask,
)
from infmax.graphs import WeightedGraph, generate_er


def path_graph(q=0.5):
    return WeightedGraph(3, [0, 1], [1, 2], [q, q])


def random_instance(rng, max_n=8, max_edges=12):
    """Random small weighted graph for oracle-based tests."""
    n = int(rng.integers(3, max_n + 1))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    rng.shuffle(pairs)
    n_edges = int(rng.integers(1, min(len(pairs), max_edges) + 1))
    chosen = pairs[:n_edges]
    q = rng.uniform(0.05, 0.95, size=n_edges)
    u = [a for a, _ in chosen]
    v = [b for _, b in chosen]
    return WeightedGraph(n, u, v, q)


# ---------------------------------------------------------------------------
# realize / influenced_count


def test_realize_keeps_all_edges_at_q1():
    g = WeightedGraph(4, [0, 1, 2], [1, 2, 3], [1.0, 1.0, 1.0])
    real = realize(g, rng_seed=0)
    assert real.live_edges.tolist() == [0, 1, 2]
    assert real.component_size.max() == 4


def test_realize_all_singletons_at_q0():
    g = WeightedGraph(4, [0, 1, 2], [1, 2, 3], [0.0, 0.0, 0.0])
    real = realize(g, rng_seed=0)
    assert real.live_edges.size == 0
    assert np.all(real.component_size == 1)


def test_realize_deterministic():
    g = generate_er(50, 0.1, 0.5, rng_seed=1)
    r1, r2 = realize(g, 9), realize(g, 9)
    assert np.array_equal(r1.live_edges, r2.live_edges)
    assert np.array_equal(r1.component_of, r2.component_of)


@pytest.mark.statistical
def test_realize_edge_frequency():
    # single edge with q=0.5: live in about half of 10k seeded realizations
    g = WeightedGraph(2, [0], [1], [0.5])
    live = sum(realize(g, s).live_edges.size for s in range(10_000))
    assert abs(live / 10_000 - 0.5) <= 0.02


def test_influenced_count_trivial_sets():
    g = WeightedGraph(4, [0, 1, 2], [1, 2, 3], [1.0, 1.0, 1.0])
    real = realize(g, 0)
    assert influenced_count(real, []) == 0
    assert influenced_count(real, range(4)) == 4


def test_influenced_count_no_double_counting():
    # fully live triangle: two seeds in one component still count 3 nodes
    g = WeightedGraph(3, [0, 0, 1], [1, 2, 2], [1.0, 1.0, 1.0])
    real = realize(g, 0)
    assert influenced_count(real, [0, 1]) == 3


def test_influenced_count_rejects_bad_seed():
    g = path_graph()
    real = realize(g, 0)
    with pytest.raises(ValueError, match="out of range"):
        influenced_count(real, [7])


@given(st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_influenced_count_monotone_in_seed_set(seed):
    rng = np.random.default_rng(seed)
    g = random_instance(rng)
    real = realize(g, seed)
    nodes = list(rng.permutation(g.n))
    cut = int(rng.integers(0, g.n))
    small, big = nodes[:cut], nodes[:min(cut + 2, g.n)]
    assert influenced_count(real, small) <= influenced_count(real, big)


# ---------------------------------------------------------------------------
# influence_mc


def test_mc_empty_seed_set_is_zero():
    g = path_graph()
    est = influence_mc(g, [], 100, 0)
    assert est.mean == 0.0 and est.std_error == 0.0


def test_mc_deterministic_instance():
    # two disjoint q=1 edges, one seed in each: always 4 nodes
    g = WeightedGraph(4, [0, 2], [1, 3], [1.0, 1.0])
    est = influence_mc(g, [0, 2], 500, 3)
    assert est.mean == 4.0 and est.std_error == 0.0


@pytest.mark.statistical
def test_mc_matches_hand_enumeration_on_path():
    # seeds {a} on a-b-c with q=1/2: four equiprobable patterns give
    # (1 + 2 + 1 + 3) / 4 = 1.75
    est = influence_mc(path_graph(0.5), [0], 200_000, 11)
    assert abs(est.mean - 1.75) <= 0.02


def test_mc_single_realization_warns():
    with pytest.warns(UserWarning):
        est = influence_mc(path_graph(), [0], 1, 0)
    assert est.std_error == 0.0 and est.realizations == 1


def test_mc_validates_realizations():
    with pytest.raises(ValueError):
        influence_mc(path_graph(), [0], 0, 0)


def test_mc_deterministic_per_seed():
    g = generate_er(40, 0.1, 0.4, rng_seed=2)
    a = influence_mc(g, [0, 5], 2_000, 21)
    b = influence_mc(g, [0, 5], 2_000, 21)
    assert a == b


# ---------------------------------------------------------------------------
# exact oracle


def test_exact_path():
    assert influence_exact(path_graph(0.5), [0]) == pytest.approx(1.75)


def test_exact_single_edge():
    g = WeightedGraph(2, [0], [1], [0.3])
    assert influence_exact(g, [0]) == pytest.approx(1.3)


def test_exact_full_seed_set_is_n():
    g = random_instance(np.random.default_rng(4))
    assert influence_exact(g, range(g.n)) == pytest.approx(g.n)


def test_exact_refuses_large_edge_sets():
    g = generate_er(15, 0.5, 0.5, rng_seed=0)
    assert g.num_edges > 25
    with pytest.raises(ValueError, match="<= 25 edges"):
        influence_exact(g, [0])
    with pytest.raises(ValueError, match="<= 25 edges"):
        influence_exact_table(g)


def test_exact_table_matches_direct_enumeration():
    rng = np.random.default_rng(7)
    for _ in range(10):
        g = random_instance(rng)
        f = influence_exact_table(g)
        for seeds in ([], [0], [g.n - 1], [0, 1], list(range(g.n))):
            assert f[seed_mask(seeds)] == pytest.approx(influence_exact(g, seeds))


def test_exact_at_least_seed_count():
    rng = np.random.default_rng(8)
    for _ in range(10):
        g = random_instance(rng)
        seeds = list(rng.choice(g.n, size=rng.integers(1, g.n), replace=False))
        assert influence_exact(g, seeds) >= len(seeds) - 1e-12


@given(st.integers(0, 10_000))
@settings(max_examples=20, deadline=None)
def test_exact_influence_is_submodular(seed):
    # diminishing returns: adding a node helps a subset at least as much as
    # its superset
    rng = np.random.default_rng(seed)
    g = random_instance(rng)
    f = influence_exact_table(g)
    nodes = list(rng.permutation(g.n))
    a = nodes[0]
    cut = int(rng.integers(0, g.n - 1))
    small = nodes[1:1 + cut]
    big = nodes[1:1 + min(cut + 2, g.n - 1)]
    sm, bm, am = seed_mask(small), seed_mask(big), 1 << a
    assert (f[sm | am] - f[sm]) >= (f[bm | am] - f[bm]) - 1e-9


def test_exact_monotone_in_edge_probability():
    g1 = WeightedGraph(3, [0, 1], [1, 2], [0.2, 0.2])
    g2 = WeightedGraph(3, [0, 1], [1, 2], [0.6, 0.6])
    assert influence_exact(g2, [0]) > influence_exact(g1, [0])


@pytest.mark.statistical
def test_mc_agrees_with_exact_oracle():
    # quick version of the full acceptance check
    rng = np.random.default_rng(99)
    for _ in range(5):
        g = random_instance(rng)
        seeds = [int(rng.integers(g.n))]
        exact = influence_exact(g, seeds)
        est = influence_mc(g, seeds, 100_000, int(rng.integers(1 << 30)))
        assert abs(est.mean - exact) <= 4 * max(est.std_error, 1e-9)
