"""Named families and the seeded random regular generator."""

from __future__ import annotations

import networkx as nx
import pytest

from graph_generators import RandomRegularError, generate, random_regular


@pytest.mark.parametrize(
    ("family", "params", "n", "d"),
    [
        ("cycle", {"n": 7}, 7, 2),
        ("complete", {"n": 5}, 5, 4),
        ("complete_bipartite", {"m": 3}, 6, 3),
        ("hypercube", {"dim": 4}, 16, 4),
        ("petersen", {}, 10, 3),
        ("circulant", {"n": 9, "offsets": "1,3"}, 9, 4),
        ("circulant", {"n": 8, "offsets": [1, 4]}, 8, 3),
        ("random_regular", {"n": 14, "degree": 3}, 14, 3),
    ],
)
def test_family_sizes_and_degrees(family, params, n, d):
    g = generate(family, params, seed=5)
    assert g.n == n
    assert g.d == d
    assert len(g.edges) == n * d // 2


def test_cycle_edges():
    assert generate("cycle", {"n": 4}).edges == ((0, 1), (0, 3), (1, 2), (2, 3))


def test_random_regular_is_deterministic_per_seed():
    a = random_regular(20, 3, seed=11)
    b = random_regular(20, 3, seed=11)
    c = random_regular(20, 3, seed=12)
    assert a == b
    assert a.edges != c.edges


@pytest.mark.parametrize(("n", "d"), [(10, 6), (16, 6), (36, 6), (9, 4)])
def test_random_regular_dense_degrees(n, d):
    g = random_regular(n, d, seed=3)
    assert g.d == d


def test_random_regular_rejects_odd_stub_count():
    with pytest.raises(ValueError, match="even"):
        random_regular(9, 3, seed=0)


def test_random_regular_rejects_degree_at_least_n():
    with pytest.raises(ValueError, match="1 <= d < n"):
        random_regular(4, 4, seed=0)


def test_random_regular_budget_exhaustion():
    # n=4, d=1 is a perfect matching: always disconnected.
    with pytest.raises(RandomRegularError) as info:
        random_regular(4, 1, seed=0, budget=5)
    assert info.value.budget == 5
    assert info.value.seed == 0


def test_unknown_family():
    with pytest.raises(ValueError, match="unknown graph family"):
        generate("moebius", {})


def test_missing_parameter():
    with pytest.raises(ValueError, match="'n'"):
        generate("cycle", {})


@pytest.mark.parametrize("n", [0, 1, 2, -4])
def test_circulant_rejects_tiny_cycles(n):
    with pytest.raises(ValueError, match="circulant requires n >= 3"):
        generate("circulant", {"n": n, "offsets": "1"})


def test_random_regular_draws_are_connected_and_simple():
    for seed in range(6):
        g = random_regular(30, 3, seed=seed)
        nxg = g.to_networkx()
        assert nx.is_connected(nxg)
        assert nx.number_of_selfloops(nxg) == 0
        assert all(deg == 3 for _, deg in nxg.degree())
