"""Design measures as quadrature rules for the vertex mean of a graph function."""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np
from loguru import logger

from design import DesignMeasure, solve_design, verify_design
from graph_core import DimensionMismatchError
from run_settings import VERIFICATION_TOL
from spectral import SpectralBasis, reorder_basis

FUNCTION_KINDS: tuple[str, ...] = ("low_pass", "high_pass", "random", "indicator")
GENERATOR_NAME = "numpy.PCG64"
BATCH_COLUMNS: tuple[str, ...] = ("function_id", "error", "bound", "fraction")

_PARSEVAL_TOL = 1e-9
_IDENTITY_TOL = 1e-10


class BandIndexError(ValueError):
    """Band limit or frequency index outside the basis."""


@dataclass(frozen=True)
class GraphFunction:
    """Vertex values f with their coefficients <phi_i, f> against one basis."""

    values: np.ndarray
    coefficients: np.ndarray
    label: str = "f"
    provenance: dict[str, Any] = field(default_factory=dict, compare=False)

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    @property
    def mean(self) -> float:
        return float(np.mean(self.values))

    @property
    def parseval_gap(self) -> float:
        return abs(float(self.coefficients @ self.coefficients) - float(self.values @ self.values))


def graph_function(
    basis: SpectralBasis,
    values: Sequence[float] | np.ndarray,
    *,
    label: str = "f",
    provenance: dict[str, Any] | None = None,
) -> GraphFunction:
    arr = np.array(values, dtype=float)
    if arr.shape != (basis.n,):
        raise DimensionMismatchError(f"function must have length {basis.n}, got shape {arr.shape}")
    arr.setflags(write=False)
    coeffs = basis.coefficients(arr)
    coeffs.setflags(write=False)
    f = GraphFunction(values=arr, coefficients=coeffs, label=label, provenance=provenance or {})
    energy = float(arr @ arr)
    if f.parseval_gap > _PARSEVAL_TOL * max(1.0, energy):
        logger.warning(f"Parseval gap {f.parseval_gap:.3e} for {label}; basis may not be orthonormal")
    return f


def make_test_function(
    basis: SpectralBasis,
    kind: str,
    *,
    band: int | None = None,
    seed: int = 0,
    vertices: Iterable[int] | None = None,
    label: str | None = None,
) -> GraphFunction:
    """Seeded test functions.

    low_pass: normal coefficients on phi_1..phi_band. high_pass: on phi_{band+1}..phi_n.
    random: standard-normal vertex values. indicator: 0/1 vector of ``vertices``.
    """
    n = basis.n
    provenance: dict[str, Any] = {"kind": kind}
    if kind in ("low_pass", "high_pass"):
        if band is None:
            raise BandIndexError(f"{kind} needs a band index")
        upper = n if kind == "low_pass" else n - 1
        lower = 1 if kind == "low_pass" else 0
        if not lower <= band <= upper:
            raise BandIndexError(f"{kind} band must lie in {lower}..{upper}, got {band}")
        rng = np.random.default_rng(seed)
        coeffs = np.zeros(n)
        sl = slice(0, band) if kind == "low_pass" else slice(band, n)
        coeffs[sl] = rng.standard_normal(len(range(n)[sl]))
        values = basis.vectors.T @ coeffs
        provenance.update(band=band, generator=GENERATOR_NAME, seed=seed)
    elif kind == "random":
        rng = np.random.default_rng(seed)
        values = rng.standard_normal(n)
        provenance.update(generator=GENERATOR_NAME, seed=seed)
    elif kind == "indicator":
        chosen = sorted({int(v) for v in vertices or ()})
        if not chosen:
            raise BandIndexError("indicator needs at least one vertex")
        if chosen[0] < 0 or chosen[-1] >= n:
            raise BandIndexError(f"indicator vertices must lie in 0..{n - 1}, got {chosen}")
        values = np.zeros(n)
        values[chosen] = 1.0
        provenance.update(vertices=chosen)
    else:
        raise ValueError(f"unknown function kind {kind!r}; choose from {', '.join(FUNCTION_KINDS)}")
    name = label or (f"{kind}-{seed}" if "seed" in provenance else kind)
    return graph_function(basis, values, label=name, provenance=provenance)


@dataclass(frozen=True)
class SamplingReport:
    label: str
    support: tuple[int, ...]
    weights: tuple[float, ...]
    quadrature: float
    mean: float
    error: float
    bound: float
    high_freq_energy_fraction: float
    identity_error: float
    identity_gap: float
    tol: float = VERIFICATION_TOL
    provenance: dict[str, Any] = field(default_factory=dict, compare=False)

    @property
    def ratio(self) -> float | None:
        """Realized tightness error / bound (None when the bound vanishes)."""
        return self.error / self.bound if self.bound > 0.0 else None

    @property
    def bound_ok(self) -> bool:
        return self.error <= self.bound + self.tol

    @property
    def identity_ok(self) -> bool:
        return self.identity_gap <= _IDENTITY_TOL

    @property
    def passed(self) -> bool:
        return self.bound_ok and self.identity_ok

    def to_document(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "passed": self.passed,
            "support": list(self.support),
            "weights": list(self.weights),
            "quadrature": self.quadrature,
            "mean": self.mean,
            "error": self.error,
            "bound": self.bound,
            "ratio": self.ratio,
            "high_freq_energy_fraction": self.high_freq_energy_fraction,
            "identity_error": self.identity_error,
            "identity_gap": self.identity_gap,
            "provenance": dict(self.provenance),
        }

    def to_row(self) -> tuple[str, float, float, float]:
        return (self.label, self.error, self.bound, self.high_freq_energy_fraction)


def _outside_band(basis: SpectralBasis, m: DesignMeasure) -> np.ndarray:
    """0-based indices i with position i+1 not in {1} and not annihilated by ``m``."""
    annihilated = set(m.annihilated or range(2, m.ell + 1))
    return np.array([i for i in range(1, basis.n) if i + 1 not in annihilated], dtype=np.intp)


def quadrature(
    basis: SpectralBasis,
    m: DesignMeasure,
    f: GraphFunction,
    *,
    tol: float = VERIFICATION_TOL,
) -> SamplingReport:
    """Estimate the mean of ``f`` by sum_u a_u f(u) and bound the error by the
    energy of ``f`` outside the design's annihilated band."""
    if not basis.n == m.n == f.n:
        raise DimensionMismatchError(
            f"basis has {basis.n} vertices, measure {m.n}, function {f.n}"
        )
    w = m.as_vector()
    quad = float(f.values @ w)
    mean = f.mean
    error = abs(mean - quad)

    outside = _outside_band(basis, m)
    f_high = f.coefficients[outside]
    w_high = basis.coefficients(w)[outside]
    high_energy = float(f_high @ f_high)
    bound = math.sqrt(high_energy)
    identity = -float(f_high @ w_high)
    energy = float(f.values @ f.values)
    fraction = high_energy / energy if energy > 0.0 else 0.0

    return SamplingReport(
        label=f.label,
        support=m.support,
        weights=m.weights,
        quadrature=quad,
        mean=mean,
        error=error,
        bound=bound,
        high_freq_energy_fraction=fraction,
        identity_error=identity,
        identity_gap=abs((mean - quad) - identity),
        tol=tol,
        provenance=dict(f.provenance),
    )


@dataclass(frozen=True)
class SamplingBatch:
    reports: tuple[SamplingReport, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    @property
    def worst_ratio(self) -> float | None:
        ratios = [r.ratio for r in self.reports if r.ratio is not None]
        return max(ratios, default=None)

    def rows(self) -> list[tuple[str, float, float, float]]:
        return [r.to_row() for r in self.reports]

    def to_document(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "count": len(self.reports),
            "failures": [r.label for r in self.reports if not r.passed],
            "worst_ratio": self.worst_ratio,
            "reports": [r.to_document() for r in self.reports],
        }


def sample_batch(
    basis: SpectralBasis,
    m: DesignMeasure,
    functions: Sequence[GraphFunction],
    *,
    tol: float = VERIFICATION_TOL,
    jobs: int = 1,
) -> SamplingBatch:
    """Quadrature over many functions against one shared read-only basis."""

    def one(f: GraphFunction) -> SamplingReport:
        return quadrature(basis, m, f, tol=tol)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            reports = tuple(pool.map(one, functions))
    else:
        reports = tuple(one(f) for f in functions)
    batch = SamplingBatch(reports)
    logger.info(f"sampled {len(reports)} functions at ell={m.ell}: passed={batch.passed}")
    return batch


def tailored_design_for(
    basis: SpectralBasis,
    frequencies: Iterable[int],
    method: str = "reduce_uniform",
    *,
    tol: float = VERIFICATION_TOL,
) -> DesignMeasure:
    """Design orthogonal to exactly the eigenvectors at ``frequencies`` (positions 2..n).

    The chosen positions are moved to 2..ell of a reordered basis, a design is solved
    there, and the result is re-expressed against ``basis``.
    """
    n = basis.n
    chosen = [int(j) for j in frequencies]
    if len(set(chosen)) != len(chosen):
        raise BandIndexError(f"frequencies must be distinct, got {chosen}")
    if not chosen:
        raise BandIndexError("at least one frequency is required")
    bad = [j for j in chosen if not 2 <= j <= n]
    if bad:
        raise BandIndexError(f"frequencies must lie in 2..{n}, got {bad}")
    ell = len(chosen) + 1
    if ell > n - 1:
        raise BandIndexError(f"{len(chosen)} frequencies need ell={ell} > n-1={n - 1}")

    band = sorted(chosen)
    rest = [j for j in range(2, n + 1) if j not in set(band)]
    reordered = reorder_basis(basis, [1, *band, *rest])
    design = solve_design(reordered, ell, method)
    design = replace(design, annihilated=tuple(band))
    check = verify_design(basis, design, tol=tol)
    design = replace(design, orthogonality_residual=check.orthogonality_residual)
    if not check.passed:
        logger.warning(
            f"tailored design for {band} fails verification "
            f"(residual {check.orthogonality_residual:.2e})"
        )
    return design
