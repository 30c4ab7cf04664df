"""Shared fixtures: named graphs, their bases, a seeded regular corpus, non-regular graphs."""

from __future__ import annotations

import networkx as nx
import pytest

from design import solve_design
from graph_core import build_graph
from graph_generators import generate, random_regular
from spectral import OperatorKind, decompose

# (n, degree, seed) for the random regular corpus: ten graphs each at d = 3, 4, 6.
REGULAR_CORPUS = (
    [(n, 3, 100 + i) for i, n in enumerate((10, 12, 14, 16, 18, 20, 24, 28, 32, 36))]
    + [(n, 4, 200 + i) for i, n in enumerate((9, 10, 12, 15, 18, 21, 24, 27, 30, 40))]
    + [(n, 6, 300 + i) for i, n in enumerate((10, 12, 14, 16, 20, 22, 25, 28, 32, 36))]
)


@pytest.fixture(scope="session")
def petersen():
    return generate("petersen")


@pytest.fixture(scope="session")
def petersen_basis(petersen):
    return decompose(petersen)


@pytest.fixture(scope="session")
def c4():
    return generate("cycle", {"n": 4})


@pytest.fixture(scope="session")
def c4_basis(c4):
    return decompose(c4)


@pytest.fixture(scope="session")
def k33_basis():
    return decompose(generate("complete_bipartite", {"m": 3}))


@pytest.fixture(scope="session")
def regular_corpus():
    """Bases of the 30 seeded random regular graphs."""
    return [decompose(random_regular(n, d, seed)) for n, d, seed in REGULAR_CORPUS]


@pytest.fixture(scope="session")
def corpus_designs(regular_corpus):
    """(basis, {ell: design}) for every ell = 1..n-1 of every corpus graph."""
    return [
        (basis, {ell: solve_design(basis, ell) for ell in range(1, basis.n)})
        for basis in regular_corpus
    ]


def _from_nx(nxg: nx.Graph):
    relabeled = nx.convert_node_labels_to_integers(nxg, ordering="sorted")
    return build_graph(relabeled.number_of_nodes(), relabeled.edges(), regular=False)


@pytest.fixture(scope="session")
def irregular_graphs():
    return [
        _from_nx(nx.path_graph(12)),
        _from_nx(nx.star_graph(9)),
        _from_nx(nx.wheel_graph(12)),
        _from_nx(nx.lollipop_graph(6, 8)),
        _from_nx(nx.barbell_graph(5, 3)),
    ]


@pytest.fixture(scope="session")
def laplacian_bases(irregular_graphs):
    return [decompose(g, OperatorKind.LAPLACIAN) for g in irregular_graphs]


@pytest.fixture
def settings_file(tmp_path, monkeypatch):
    """Point run_settings at a temp settings file and clear the tolerance override."""
    import run_settings

    path = tmp_path / "designwalk_settings.json"
    monkeypatch.setattr(run_settings, "SETTINGS_PATH", path)
    monkeypatch.setattr(run_settings, "_ROOT", tmp_path)
    monkeypatch.delenv(run_settings.TOL_ENV, raising=False)
    return path
