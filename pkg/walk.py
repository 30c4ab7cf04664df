"""Random-walk distribution dynamics mu_{k+1} = A D^-1 mu_k and their spectral bounds."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, replace
from typing import Any

import numpy as np
from loguru import logger

from design import DesignMeasure, decay_base, verify_design
from graph_core import DimensionMismatchError, Graph, walk_matrix_apply
from run_settings import RATE_FLOOR, VERIFICATION_TOL
from spectral import OperatorKind, SpectralBasis

# Slack on the initial measure; each iterate is held to the tighter _MASS_TOL.
_PROBABILITY_TOL = 1e-10
_MASS_TOL = 1e-12

TRACE_COLUMNS: tuple[str, ...] = ("k", "distance_sq", "bound", "sharpened_bound", "distance")


class ProbabilityVectorError(ValueError):
    """Initial measure has a negative entry or does not sum to 1."""


class OperatorMismatchError(ValueError):
    """Walk quantities were requested from a Laplacian basis."""


def require_walk_basis(basis: SpectralBasis) -> None:
    if basis.operator is not OperatorKind.WALK_MATRIX:
        raise OperatorMismatchError(
            f"walk dynamics need a walk_matrix basis, got {basis.operator.value}"
        )


def as_probability_vector(g: Graph, mu0: Sequence[float] | np.ndarray) -> np.ndarray:
    mu = np.asarray(mu0, dtype=float)
    if mu.shape != (g.n,):
        raise DimensionMismatchError(f"initial measure must have length {g.n}, got shape {mu.shape}")
    if np.any(mu < 0.0):
        v = int(np.argmin(mu))
        raise ProbabilityVectorError(f"initial measure has negative entry {mu[v]:.3e} at vertex {v}")
    total = float(np.sum(mu))
    if abs(total - 1.0) > _PROBABILITY_TOL:
        raise ProbabilityVectorError(f"initial measure sums to {total!r}, not 1")
    return mu


def squared_distance_to_uniform(mu: np.ndarray) -> float:
    diff = mu - 1.0 / mu.shape[0]
    return float(diff @ diff)


@dataclass(frozen=True)
class WalkTrace:
    """Squared distances d_k to the uniform measure for k = 0..steps.

    ``bound_base`` is filled in once a bound has been attached (verify_theorem1 /
    verify_baseline); the CSV bound columns stay empty until then.
    """

    mu0: np.ndarray
    steps: int
    distances: tuple[float, ...]
    measures: np.ndarray
    fitted_rate: float | None = None
    bound_base: float | None = None

    @property
    def mu0_norm_sq(self) -> float:
        return float(self.mu0 @ self.mu0)

    def rows(self) -> list[tuple[int, float, float | None, float | None, float]]:
        out = []
        for k, d in enumerate(self.distances):
            if self.bound_base is None:
                bound = sharpened = None
            else:
                bound = self.bound_base ** (2 * k)
                sharpened = self.mu0_norm_sq * bound
            out.append((k, d, bound, sharpened, math.sqrt(d)))
        return out


def _fit_base(distances: Sequence[float], floor: float = RATE_FLOOR) -> float | None:
    points = [(k, 0.5 * math.log(d)) for k, d in enumerate(distances) if d > floor]
    if len(points) < 3:
        return None
    burn_in = min(len(points) // 4, len(points) - 3)
    ks, ys = zip(*points[burn_in:])
    slope, _ = np.polyfit(np.asarray(ks, dtype=float), np.asarray(ys), 1)
    return float(math.exp(slope))


def rate_fit(trace: WalkTrace, *, floor: float = RATE_FLOOR) -> float | None:
    """Empirical per-step decay base exp(slope of 0.5 * log d_k against k).

    Only points with d_k > ``floor`` are used, and the first quarter of them is dropped
    as burn-in (at least three points are kept). None with fewer than three points.
    """
    if trace.steps < 4:
        return None
    return _fit_base(trace.distances, floor)


def iterate_walk(g: Graph, mu0: Sequence[float] | np.ndarray, steps: int) -> WalkTrace:
    """Apply the walk matrix ``steps`` times, recording d_k at each step."""
    if steps < 0:
        raise ValueError(f"step count must be nonnegative, got {steps}")
    mu = as_probability_vector(g, mu0)
    measures = np.empty((steps + 1, g.n))
    measures[0] = mu
    distances = [squared_distance_to_uniform(mu)]
    for k in range(1, steps + 1):
        mu = walk_matrix_apply(g, mu)
        measures[k] = mu
        distances.append(squared_distance_to_uniform(mu))
        if abs(float(np.sum(mu)) - 1.0) > _MASS_TOL:
            logger.warning(f"walk step {k} drifted off the simplex: mass {float(np.sum(mu))!r}")
    measures.setflags(write=False)
    start = np.array(mu0, dtype=float)
    start.setflags(write=False)
    return WalkTrace(
        mu0=start,
        steps=steps,
        distances=tuple(distances),
        measures=measures,
        fitted_rate=_fit_base(distances) if steps >= 4 else None,
    )


def spectral_distance(basis: SpectralBasis, mu0: Sequence[float] | np.ndarray, k: int) -> float:
    """sum_{j>=2} lambda_j^{2k} <mu0, phi_j>^2, the exact d_k without iterating."""
    require_walk_basis(basis)
    if k < 0:
        raise ValueError(f"step index must be nonnegative, got {k}")
    coeffs = basis.coefficients(mu0)[1:]
    return float(np.sum(np.power(basis.eigenvalues[1:], 2 * k) * coeffs**2))


def asymptotic_base(
    basis: SpectralBasis,
    mu0: Sequence[float] | np.ndarray,
    *,
    tol: float = VERIFICATION_TOL,
) -> float:
    """Largest |lambda_j| (j > 1) whose coefficient <mu0, phi_j> survives ``tol``."""
    require_walk_basis(basis)
    coeffs = basis.coefficients(mu0)
    mags = [abs(float(basis.eigenvalues[j])) for j in range(1, basis.n) if abs(coeffs[j]) > tol]
    return max(mags, default=0.0)


@dataclass(frozen=True)
class BoundCheck:
    k: int
    iterated: float
    spectral: float
    bound: float
    sharpened_bound: float

    def to_row(self) -> tuple[int, float, float, float, float]:
        return (self.k, self.iterated, self.spectral, self.bound, self.sharpened_bound)


@dataclass(frozen=True)
class BoundReport:
    """Outcome of checking d_k against base^{2k} (and the ||w||^2 sharpening) for k = 0..K."""

    kind: str
    ell: int
    base: float
    norm_sq: float
    steps: int
    tol: float
    checks: tuple[BoundCheck, ...]
    trace: WalkTrace
    max_disagreement: float
    precondition_ok: bool = True
    fitted_rate: float | None = None
    predicted_rate: float | None = None

    @property
    def bound_ok(self) -> bool:
        return all(
            max(c.iterated, c.spectral) <= c.bound + self.tol for c in self.checks
        )

    @property
    def sharpened_ok(self) -> bool:
        return all(
            max(c.iterated, c.spectral) <= c.sharpened_bound + self.tol for c in self.checks
        )

    @property
    def agreement_ok(self) -> bool:
        return self.max_disagreement <= self.tol

    @property
    def passed(self) -> bool:
        return self.precondition_ok and self.bound_ok and self.sharpened_ok and self.agreement_ok

    def first_violation(self) -> int | None:
        for c in self.checks:
            if max(c.iterated, c.spectral) > c.bound + self.tol:
                return c.k
        return None

    def to_document(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "passed": self.passed,
            "ell": self.ell,
            "base": self.base,
            "norm_sq": self.norm_sq,
            "steps": self.steps,
            "tol": self.tol,
            "precondition_ok": self.precondition_ok,
            "bound_ok": self.bound_ok,
            "sharpened_ok": self.sharpened_ok,
            "agreement_ok": self.agreement_ok,
            "max_disagreement": self.max_disagreement,
            "first_violation": self.first_violation(),
            "fitted_rate": self.fitted_rate,
            "predicted_rate": self.predicted_rate,
        }


def _check_bounds(
    basis: SpectralBasis,
    mu0: np.ndarray,
    steps: int,
    base: float,
    tol: float,
) -> tuple[WalkTrace, tuple[BoundCheck, ...], float]:
    trace = replace(iterate_walk(basis.graph, mu0, steps), bound_base=base)
    norm_sq = trace.mu0_norm_sq
    checks = []
    worst = 0.0
    for k, iterated in enumerate(trace.distances):
        exact = spectral_distance(basis, mu0, k)
        worst = max(worst, abs(iterated - exact))
        bound = base ** (2 * k)
        checks.append(BoundCheck(k, iterated, exact, bound, norm_sq * bound))
    return trace, tuple(checks), worst


def verify_theorem1(
    basis: SpectralBasis,
    m: DesignMeasure,
    steps: int,
    *,
    tol: float = VERIFICATION_TOL,
) -> BoundReport:
    """Check d_k <= |lambda_{l+1}|^{2k} + tol for a design start, with both evaluators.

    The base is the largest |lambda_j| among positions the design does not annihilate,
    which is |lambda_{l+1}| under the default ordering.
    """
    require_walk_basis(basis)
    precondition = verify_design(basis, m, tol=tol).passed
    if not precondition:
        logger.warning(f"design at ell={m.ell} fails verification; bound report will not pass")
    mu0 = m.as_vector()
    base = decay_base(basis, m)
    trace, checks, worst = _check_bounds(basis, mu0, steps, base, tol)
    report = BoundReport(
        kind="design",
        ell=m.ell,
        base=base,
        norm_sq=m.l2_norm_sq,
        steps=steps,
        tol=tol,
        checks=checks,
        trace=trace,
        max_disagreement=worst,
        precondition_ok=precondition,
        fitted_rate=trace.fitted_rate,
        predicted_rate=asymptotic_base(basis, mu0, tol=tol),
    )
    violation = report.first_violation()
    if violation is not None:
        logger.warning(f"bound violated at k={violation} for ell={m.ell} (base {base:.6g})")
    logger.info(
        f"walk check ell={m.ell} base={base:.6g} passed={report.passed} "
        f"disagreement={worst:.2e}"
    )
    return report


def verify_baseline(
    basis: SpectralBasis,
    mu0: Sequence[float] | np.ndarray,
    steps: int,
    *,
    tol: float = VERIFICATION_TOL,
) -> BoundReport:
    """Check d_k <= |lambda_2|^{2k} + tol for an arbitrary probability start."""
    require_walk_basis(basis)
    start = as_probability_vector(basis.graph, mu0)
    base = float(np.max(np.abs(basis.eigenvalues[1:]))) if basis.n > 1 else 0.0
    trace, checks, worst = _check_bounds(basis, start, steps, base, tol)
    return BoundReport(
        kind="baseline",
        ell=1,
        base=base,
        norm_sq=trace.mu0_norm_sq,
        steps=steps,
        tol=tol,
        checks=checks,
        trace=trace,
        max_disagreement=worst,
        fitted_rate=trace.fitted_rate,
        predicted_rate=asymptotic_base(basis, start, tol=tol),
    )
