"""Graph type, edge-list ingest/emit, validation, and the walk / Laplacian operators."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field

import networkx as nx
import numpy as np
from loguru import logger


class EdgeListParseError(ValueError):
    """Malformed edge-list line."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class GraphValidationError(ValueError):
    """Graph violates simplicity, regularity, or connectivity."""


class DimensionMismatchError(ValueError):
    """Vertex-indexed vector has the wrong length."""


@dataclass(frozen=True)
class Graph:
    """Undirected simple connected graph on vertices 0..n-1.

    ``edges`` is canonical: pairs (i, j) with i < j in lexicographic order.
    ``d`` is the common degree, or None when the graph is not regular
    (only the Laplacian pipeline accepts those).
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    degrees: tuple[int, ...] = field(compare=False)
    neighbors: tuple[tuple[int, ...], ...] = field(compare=False, repr=False)
    _src: np.ndarray = field(compare=False, repr=False)
    _dst: np.ndarray = field(compare=False, repr=False)

    @property
    def d(self) -> int | None:
        first = self.degrees[0]
        return first if all(deg == first for deg in self.degrees) else None

    @property
    def is_regular(self) -> bool:
        return self.d is not None

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        a[self._src, self._dst] = 1.0
        return a

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g


def _regularity_violation(degrees: tuple[int, ...]) -> str | None:
    ref = degrees[0]
    for v, deg in enumerate(degrees):
        if deg != ref:
            return f"vertex 0 has degree {ref} != degree {deg} of vertex {v}"
    return None


def require_regular(g: Graph) -> int:
    """Common degree of ``g``; raises GraphValidationError naming the first mismatch."""
    problem = _regularity_violation(g.degrees)
    if problem is not None:
        raise GraphValidationError(f"graph is not regular: {problem}")
    return g.degrees[0]


def build_graph(
    n: int,
    edges: Iterable[tuple[int, int]],
    *,
    regular: bool = True,
) -> Graph:
    """Validate and freeze a graph. Raises GraphValidationError on any invariant breach."""
    if n < 1:
        raise GraphValidationError(f"vertex count must be positive, got {n}")
    seen: set[tuple[int, int]] = set()
    for i, j in edges:
        i, j = int(i), int(j)
        if i == j:
            raise GraphValidationError(f"self-loop at vertex {i}")
        if not (0 <= i < n and 0 <= j < n):
            raise GraphValidationError(f"edge {{{i},{j}}} references a vertex outside 0..{n - 1}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise GraphValidationError(f"duplicate edge {{{key[0]},{key[1]}}}")
        seen.add(key)
    if n > 1 and len(seen) < n - 1:
        raise GraphValidationError(
            f"graph is disconnected: {n} vertices need at least {n - 1} edges, got {len(seen)}"
        )

    canonical = tuple(sorted(seen))
    adj: list[list[int]] = [[] for _ in range(n)]
    for i, j in canonical:
        adj[i].append(j)
        adj[j].append(i)
    neighbors = tuple(tuple(sorted(row)) for row in adj)
    degrees = tuple(len(row) for row in neighbors)

    if regular:
        problem = _regularity_violation(degrees)
        if problem is not None:
            raise GraphValidationError(problem)
    if n > 1 and min(degrees) == 0:
        raise GraphValidationError(f"graph is disconnected: vertex {degrees.index(0)} is isolated")

    src = np.fromiter((u for u, row in enumerate(neighbors) for _ in row), dtype=np.intp)
    dst = np.fromiter((v for row in neighbors for v in row), dtype=np.intp)
    src.setflags(write=False)
    dst.setflags(write=False)
    g = Graph(n=n, edges=canonical, degrees=degrees, neighbors=neighbors, _src=src, _dst=dst)

    if not nx.is_connected(g.to_networkx()):
        components = nx.number_connected_components(g.to_networkx())
        raise GraphValidationError(f"graph is disconnected: {components} components")
    return g


def load_edge_list(text: str, *, require_regular: bool = True) -> Graph:
    """Parse "i j" lines ('#' comments, blank lines ignored) into a validated Graph."""
    pairs: list[tuple[int, int]] = []
    seen: dict[tuple[int, int], int] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListParseError(line_no, f"expected two vertex ids, got {raw.strip()!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListParseError(line_no, f"non-integer vertex id in {raw.strip()!r}") from None
        if i < 0 or j < 0:
            raise EdgeListParseError(line_no, f"negative vertex id in {raw.strip()!r}")
        if i == j:
            raise EdgeListParseError(line_no, f"self-loop at vertex {i}")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise GraphValidationError(
                f"duplicate edge {{{key[0]},{key[1]}}} on line {line_no} "
                f"(first on line {seen[key]})"
            )
        seen[key] = line_no
        pairs.append(key)
    if not pairs:
        raise EdgeListParseError(0, "edge list is empty")
    ids = sorted({v for p in pairs for v in p})
    if ids[-1] != len(ids) - 1:
        gap = next(k for k, v in enumerate(ids) if v != k)
        raise GraphValidationError(
            f"vertex ids must form 0..n-1: id {gap} is missing (largest id {ids[-1]})"
        )
    n = len(ids)
    g = build_graph(n, pairs, regular=require_regular)
    logger.debug(f"loaded graph n={g.n} edges={len(g.edges)} d={g.d}")
    return g


def emit_edge_list(g: Graph) -> str:
    """Canonical text form: one "i j" per line, i < j, lexicographic order."""
    return "".join(f"{i} {j}\n" for i, j in g.edges)


def _as_vertex_vector(g: Graph, v: Iterable[float] | np.ndarray) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.shape != (g.n,):
        raise DimensionMismatchError(f"expected a vector of length {g.n}, got shape {arr.shape}")
    return arr


def walk_matrix_apply(g: Graph, v: Iterable[float] | np.ndarray) -> np.ndarray:
    """(1/d)·A·v by neighbour accumulation; requires a regular graph."""
    d = require_regular(g)
    arr = _as_vertex_vector(g, v)
    out = np.zeros(g.n)
    np.add.at(out, g._src, arr[g._dst])
    return out / d
