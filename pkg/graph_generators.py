"""Named regular graph families and the seeded random regular graph."""

from __future__ import annotations

from typing import Any

import networkx as nx
import numpy as np
from loguru import logger

from graph_core import Graph, GraphValidationError, build_graph
from run_settings import RANDOM_REGULAR_RETRIES

FAMILIES: tuple[str, ...] = (
    "cycle",
    "complete",
    "complete_bipartite",
    "hypercube",
    "petersen",
    "circulant",
    "random_regular",
)


class RandomRegularError(RuntimeError):
    """Pairing model produced no simple connected graph within the retry budget."""

    def __init__(self, n: int, d: int, seed: int, budget: int):
        super().__init__(
            f"random_regular(n={n}, d={d}) found no simple connected graph "
            f"with seed={seed} after {budget} attempts"
        )
        self.seed = seed
        self.budget = budget


def _int_param(params: dict[str, Any], key: str, family: str) -> int:
    if params.get(key) is None:
        raise ValueError(f"{family} requires parameter {key!r}")
    try:
        value = int(params[key])
    except (TypeError, ValueError):
        raise ValueError(f"{family}: parameter {key!r} must be an integer") from None
    return value


def _from_networkx(nxg: nx.Graph) -> Graph:
    relabeled = nx.convert_node_labels_to_integers(nxg, ordering="sorted")
    return build_graph(relabeled.number_of_nodes(), relabeled.edges(), regular=True)


def random_regular(n: int, d: int, seed: int, *, budget: int = RANDOM_REGULAR_RETRIES) -> Graph:
    """Seeded d-regular graph on n vertices; deterministic for (n, d, seed).

    Each attempt draws a simple d-regular graph with networkx's pairing model and keeps it
    only if it is connected.
    """
    if n < 1 or d < 1 or d >= n:
        raise ValueError(f"random_regular requires 1 <= d < n, got n={n}, d={d}")
    if (n * d) % 2:
        raise ValueError(f"random_regular requires n*d even, got n={n}, d={d}")
    rng = np.random.default_rng(seed)
    for attempt in range(1, budget + 1):
        nxg = nx.random_regular_graph(d, n, seed=int(rng.integers(2**32)))
        if not nx.is_connected(nxg):
            continue
        try:
            g = build_graph(n, nxg.edges(), regular=True)
        except GraphValidationError:
            continue
        logger.debug(f"random_regular(n={n}, d={d}, seed={seed}) accepted on attempt {attempt}")
        return g
    raise RandomRegularError(n, d, seed, budget)


def generate(family: str, params: dict[str, Any] | None = None, seed: int = 0) -> Graph:
    """Build a connected regular graph from a named family.

    Parameters: cycle(n), complete(n), complete_bipartite(m), hypercube(dim), petersen(),
    circulant(n, offsets), random_regular(n, degree).
    """
    params = dict(params or {})
    name = (family or "").strip().lower()
    if name == "cycle":
        n = _int_param(params, "n", name)
        if n < 3:
            raise ValueError(f"cycle requires n >= 3, got {n}")
        return build_graph(n, [(i, (i + 1) % n) for i in range(n)], regular=True)
    if name == "complete":
        n = _int_param(params, "n", name)
        if n < 2:
            raise ValueError(f"complete requires n >= 2, got {n}")
        return _from_networkx(nx.complete_graph(n))
    if name == "complete_bipartite":
        m = _int_param(params, "m", name)
        if m < 1:
            raise ValueError(f"complete_bipartite requires m >= 1, got {m}")
        return _from_networkx(nx.complete_bipartite_graph(m, m))
    if name == "hypercube":
        dim = _int_param(params, "dim", name)
        if dim < 1:
            raise ValueError(f"hypercube requires dim >= 1, got {dim}")
        return _from_networkx(nx.hypercube_graph(dim))
    if name == "petersen":
        return _from_networkx(nx.petersen_graph())
    if name == "circulant":
        n = _int_param(params, "n", name)
        if n < 3:
            raise ValueError(f"circulant requires n >= 3, got {n}")
        raw = params.get("offsets")
        if not raw:
            raise ValueError("circulant requires parameter 'offsets'")
        if isinstance(raw, str):
            raw = [part for part in raw.replace(",", " ").split() if part]
        try:
            offsets = sorted({int(o) % n for o in raw})
        except (TypeError, ValueError):
            raise ValueError(f"circulant: offsets must be integers, got {raw!r}") from None
        offsets = [o for o in offsets if o and o <= n // 2]
        if not offsets:
            raise ValueError("circulant: offsets must include a value in 1..n//2")
        return _from_networkx(nx.circulant_graph(n, offsets))
    if name == "random_regular":
        n = _int_param(params, "n", name)
        d = _int_param(params, "degree", name)
        return random_regular(n, d, seed)
    raise ValueError(f"unknown graph family {family!r}; choose from {', '.join(FAMILIES)}")
