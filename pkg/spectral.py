"""Ordered orthonormal eigenbases of the walk matrix AD^-1 or the Laplacian D - A.

Position 1 always holds the trivial pair: phi_1 = 1/sqrt(n) (constructed exactly) with
eigenvalue 1 for the walk matrix or 0 for the Laplacian. Positions are 1-based
throughout, matching how designs and reports name eigenvectors.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np
from loguru import logger

from graph_core import Graph, require_regular
from run_settings import BASIS_TOL, EIGEN_GROUP_TOL, JACOBI_MAX_SWEEPS, JACOBI_THRESHOLD
from spectral_jacobi import jacobi_eigh

# Minimum residual norm for a projected coordinate vector to seed a basis vector.
_SEED_NORM = 1e-3


class OperatorKind(str, Enum):
    WALK_MATRIX = "walk_matrix"
    LAPLACIAN = "laplacian"

    @classmethod
    def parse(cls, raw: str | OperatorKind) -> OperatorKind:
        if isinstance(raw, OperatorKind):
            return raw
        key = (raw or "").strip().lower()
        aliases = {"walk": cls.WALK_MATRIX, "walk_matrix": cls.WALK_MATRIX, "laplacian": cls.LAPLACIAN}
        if key not in aliases:
            raise ValueError(f"unknown operator {raw!r}; use walk or laplacian")
        return aliases[key]


@dataclass(frozen=True)
class OrderingPolicy:
    """``abs_desc`` (default) or ``custom``.

    A custom permutation lists the default-order positions 2..n in their new order:
    default position ``permutation[i]`` moves to position ``i + 2``.
    """

    tag: str = "abs_desc"
    permutation: tuple[int, ...] | None = None

    @classmethod
    def custom(cls, permutation: Sequence[int]) -> OrderingPolicy:
        return cls(tag="custom", permutation=tuple(int(p) for p in permutation))

    def positions(self, n: int) -> list[int]:
        """Full 1-based position list (starting with 1) in default-order numbering."""
        if self.tag == "abs_desc":
            return list(range(1, n + 1))
        if self.tag != "custom" or self.permutation is None:
            raise ValueError(f"unknown ordering policy {self.tag!r}")
        if sorted(self.permutation) != list(range(2, n + 1)):
            raise ValueError(
                f"custom ordering must be a permutation of 2..{n}, got {list(self.permutation)}"
            )
        return [1, *self.permutation]

    def to_document(self) -> dict[str, Any]:
        return {
            "tag": self.tag,
            "permutation": list(self.permutation) if self.permutation is not None else None,
        }


@dataclass(frozen=True)
class SpectralBasis:
    """Eigenpairs in policy order. ``vectors[i]`` is phi_{i+1} (rows are eigenvectors)."""

    graph: Graph
    operator: OperatorKind
    eigenvalues: np.ndarray
    vectors: np.ndarray
    ordering: OrderingPolicy
    residual: float
    sweeps: int = 0

    @property
    def n(self) -> int:
        return int(self.eigenvalues.shape[0])

    def phi(self, position: int) -> np.ndarray:
        """Eigenvector at 1-based ``position``."""
        if not 1 <= position <= self.n:
            raise IndexError(f"eigenvector position {position} outside 1..{self.n}")
        return self.vectors[position - 1]

    def coefficients(self, v: Sequence[float] | np.ndarray) -> np.ndarray:
        """<phi_i, v> for i = 1..n."""
        arr = np.asarray(v, dtype=float)
        if arr.shape != (self.n,):
            raise ValueError(f"expected a vector of length {self.n}, got shape {arr.shape}")
        return self.vectors @ arr

    def to_document(self) -> dict[str, Any]:
        return {
            "operator": self.operator.value,
            "ordering": self.ordering.to_document(),
            "n": self.n,
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "eigenvectors": [[float(x) for x in row] for row in self.vectors],
            "residual": float(self.residual),
        }


@dataclass(frozen=True)
class GapEntry:
    ell: int
    base: float
    tie: bool

    def to_row(self) -> dict[str, Any]:
        return {"ell": self.ell, "base": self.base, "tie": self.tie}


def operator_matrix(g: Graph, op: OperatorKind) -> np.ndarray:
    a = g.adjacency_matrix()
    if op is OperatorKind.WALK_MATRIX:
        return a / require_regular(g)
    return np.diag(np.asarray(g.degrees, dtype=float)) - a


def _group_indices(values: np.ndarray, tol: float) -> list[list[int]]:
    """Chain-group ascending ``values`` whose neighbours differ by at most ``tol``."""
    groups: list[list[int]] = [[0]]
    for k in range(1, len(values)):
        if values[k] - values[k - 1] <= tol:
            groups[-1].append(k)
        else:
            groups.append([k])
    return groups


def _canonical_subspace_basis(
    span: np.ndarray,
    seeds: list[np.ndarray],
    exclude: tuple[np.ndarray, ...] = (),
) -> list[np.ndarray]:
    """Deterministic orthonormal basis of the column span of ``span``.

    Starts from ``seeds`` (already orthonormal, inside the span) and extends by
    Gram-Schmidt on the projected coordinate vectors e_0, e_1, ... in order. Every
    vector is also orthogonalized against ``exclude``, which must be orthogonal to the span.
    """
    n, dim = span.shape
    proj = span @ span.T
    basis = [s.copy() for s in seeds]
    for i in range(n):
        if len(basis) >= dim:
            break
        x = proj[:, i].copy()
        for _ in range(2):
            for b in (*exclude, *basis):
                x -= (b @ x) * b
        norm = float(np.linalg.norm(x))
        if norm > _SEED_NORM:
            basis.append(x / norm)
    if len(basis) < dim:
        raise RuntimeError(f"could not complete a basis of a {dim}-dimensional eigenspace")
    return basis


def _default_order(values: np.ndarray, op: OperatorKind, tol: float) -> list[int]:
    """Indices (into ascending-value arrays) in default position order, trivial first."""
    n = len(values)
    trivial_value = 1.0 if op is OperatorKind.WALK_MATRIX else 0.0
    trivial = int(np.argmin(np.abs(values - trivial_value)))
    rest = [k for k in range(n) if k != trivial]
    if op is OperatorKind.LAPLACIAN:
        return [trivial, *rest]

    by_abs = sorted(rest, key=lambda k: (-abs(values[k]), k))
    rank: dict[int, int] = {}
    cluster = 0
    for pos, k in enumerate(by_abs):
        if pos and abs(values[by_abs[pos - 1]]) - abs(values[k]) > tol:
            cluster += 1
        rank[k] = cluster
    rest.sort(key=lambda k: (rank[k], 0 if values[k] >= 0 else 1, k))
    return [trivial, *rest]


def _basis_residual(mat: np.ndarray, values: np.ndarray, vectors: np.ndarray) -> float:
    n = len(values)
    ortho = float(np.max(np.abs(vectors @ vectors.T - np.eye(n))))
    eigen = float(np.max(np.abs(vectors @ mat - values[:, None] * vectors)))
    return max(ortho, eigen)


def decompose(
    g: Graph,
    op: OperatorKind | str = OperatorKind.WALK_MATRIX,
    policy: OrderingPolicy | None = None,
    *,
    threshold: float = JACOBI_THRESHOLD,
    max_sweeps: int = JACOBI_MAX_SWEEPS,
    group_tol: float = EIGEN_GROUP_TOL,
) -> SpectralBasis:
    """Ordered orthonormal eigenbasis of the requested operator on ``g``."""
    op = OperatorKind.parse(op)
    policy = policy or OrderingPolicy()
    mat = operator_matrix(g, op)
    n = g.n

    raw_values, raw_vectors, sweeps = jacobi_eigh(mat, threshold=threshold, max_sweeps=max_sweeps)
    asc = np.argsort(raw_values, kind="stable")
    raw_values = raw_values[asc]
    raw_vectors = raw_vectors[:, asc]

    trivial_value = 1.0 if op is OperatorKind.WALK_MATRIX else 0.0
    phi1 = np.full(n, 1.0 / np.sqrt(n))
    values = np.empty(n)
    vectors = np.empty((n, n))
    groups = _group_indices(raw_values, group_tol)
    trivial_group = min(
        range(len(groups)),
        key=lambda gi: abs(float(np.mean(raw_values[groups[gi]])) - trivial_value),
    )
    for gi, members in enumerate(groups):
        if gi == trivial_group:
            built = _canonical_subspace_basis(raw_vectors[:, members], [phi1])
        else:
            built = _canonical_subspace_basis(raw_vectors[:, members], [], (phi1,))
        value = trivial_value if gi == trivial_group else float(np.mean(raw_values[members]))
        for slot, vec in zip(members, built):
            values[slot] = value
            vectors[slot] = vec
    if len(groups[trivial_group]) > 1:
        logger.warning(
            f"trivial eigenvalue has multiplicity {len(groups[trivial_group])}; graph may be disconnected"
        )
    # The exact phi_1 must occupy the trivial slot even inside a repeated group.
    trivial_slot = groups[trivial_group][0]

    order = _default_order(values, op, group_tol)
    if order[0] != trivial_slot:
        order.remove(trivial_slot)
        order.insert(0, trivial_slot)
    positions = policy.positions(n)
    order = [order[p - 1] for p in positions]

    values = values[order]
    vectors = vectors[order]
    vectors[0] = phi1
    values.setflags(write=False)
    vectors.setflags(write=False)

    residual = _basis_residual(mat, values, vectors)
    if residual > BASIS_TOL:
        logger.warning(f"basis residual {residual:.3e} exceeds {BASIS_TOL:.0e} (n={n}, op={op.value})")
    logger.debug(f"decomposed n={n} op={op.value} policy={policy.tag} residual={residual:.3e}")
    return SpectralBasis(
        graph=g,
        operator=op,
        eigenvalues=values,
        vectors=vectors,
        ordering=policy,
        residual=residual,
        sweeps=sweeps,
    )


def reorder_basis(basis: SpectralBasis, positions: Sequence[int]) -> SpectralBasis:
    """Permute an existing basis; ``positions`` lists current 1-based positions, starting with 1."""
    n = basis.n
    positions = [int(p) for p in positions]
    if positions[:1] != [1] or sorted(positions) != list(range(1, n + 1)):
        raise ValueError(f"positions must be a permutation of 1..{n} starting with 1")
    current_default = basis.ordering.positions(n)
    composed = [current_default[p - 1] for p in positions]
    policy = (
        OrderingPolicy()
        if composed == list(range(1, n + 1))
        else OrderingPolicy.custom(composed[1:])
    )
    idx = [p - 1 for p in positions]
    values = basis.eigenvalues[idx]
    vectors = basis.vectors[idx]
    values.setflags(write=False)
    vectors.setflags(write=False)
    return SpectralBasis(
        graph=basis.graph,
        operator=basis.operator,
        eigenvalues=values,
        vectors=vectors,
        ordering=policy,
        residual=basis.residual,
        sweeps=basis.sweeps,
    )


def spectral_gap_report(basis: SpectralBasis, *, tol: float = EIGEN_GROUP_TOL) -> list[GapEntry]:
    """Decay base |lambda_{l+1}| for each l = 1..n-1, flagging ties across the cut."""
    mags = np.abs(basis.eigenvalues)
    report = []
    for ell in range(1, basis.n):
        tie = bool(abs(mags[ell - 1] - mags[ell]) <= tol)
        report.append(GapEntry(ell=ell, base=float(mags[ell]), tie=tie))
    return report
