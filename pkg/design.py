"""Sparse nonnegative design measures orthogonal to chosen nontrivial eigenvectors."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import scipy.optimize
from loguru import logger

from design_reduce import (
    build_moment_system,
    caratheodory_reduce,
    moment_residual,
    polish_support,
)
from design_simplex import NumericalBreakdownError, two_phase_simplex
from run_settings import VERIFICATION_TOL, ZERO_CLAMP_RATIO
from spectral import SpectralBasis

METHODS: tuple[str, ...] = ("reduce_uniform", "lp_vertex")

# Largest |M w - e1| accepted from an LP solve; also the input bound of caratheodory_reduce.
_LP_RESIDUAL = 1e-10


@dataclass(frozen=True)
class DesignMeasure:
    """Probability measure on ``support`` with aligned positive ``weights``.

    ``annihilated`` lists the 1-based basis positions the measure was built to be
    orthogonal to; for the default construction that is 2..ell.
    """

    n: int
    ell: int
    support: tuple[int, ...]
    weights: tuple[float, ...]
    orthogonality_residual: float
    l2_norm_sq: float
    method: str = "reduce_uniform"
    annihilated: tuple[int, ...] = field(default=())

    def as_vector(self) -> np.ndarray:
        w = np.zeros(self.n)
        w[list(self.support)] = self.weights
        return w

    def to_document(self, effective_depth: int | None = None) -> dict[str, Any]:
        return {
            "ell": self.ell,
            "method": self.method,
            "support": list(self.support),
            "weights": list(self.weights),
            "annihilated": list(self.annihilated),
            "orthogonality_residual": self.orthogonality_residual,
            "l2_norm_sq": self.l2_norm_sq,
            "effective_depth": effective_depth,
        }


@dataclass(frozen=True)
class DesignVerification:
    ell: int
    support_size: int
    support_ok: bool
    positive: bool
    mass: float
    mass_ok: bool
    inner_products: tuple[float, ...]
    orthogonality_residual: float
    orthogonality_ok: bool
    effective_depth: int
    l2_norm_sq: float

    @property
    def passed(self) -> bool:
        return self.support_ok and self.positive and self.mass_ok and self.orthogonality_ok

    def to_document(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "ell": self.ell,
            "support_size": self.support_size,
            "support_ok": self.support_ok,
            "positive": self.positive,
            "mass": self.mass,
            "mass_ok": self.mass_ok,
            "orthogonality_residual": self.orthogonality_residual,
            "orthogonality_ok": self.orthogonality_ok,
            "effective_depth": self.effective_depth,
            "l2_norm_sq": self.l2_norm_sq,
            "inner_products": list(self.inner_products),
        }


def orthogonality_depth(
    basis: SpectralBasis,
    vector: Sequence[float] | np.ndarray,
    *,
    tol: float = VERIFICATION_TOL,
) -> int:
    """Largest L <= n-1 with |<phi_j, v>| <= tol for all 2 <= j <= L (1 if none)."""
    coeffs = basis.coefficients(vector)
    depth = 1
    for j in range(2, basis.n):
        if abs(coeffs[j - 1]) > tol:
            break
        depth = j
    return depth


def decay_base(basis: SpectralBasis, m: DesignMeasure) -> float:
    """max |lambda_j| over positions j not in {1} and not annihilated by ``m``."""
    skip = {1, *m.annihilated}
    mags = [abs(float(basis.eigenvalues[j - 1])) for j in range(1, basis.n + 1) if j not in skip]
    return max(mags) if mags else 0.0


def _finalize(
    basis: SpectralBasis,
    w: np.ndarray,
    ell: int,
    method: str,
    annihilated: tuple[int, ...],
    clamp_ratio: float = ZERO_CLAMP_RATIO,
) -> DesignMeasure:
    """Clamp, normalize to a probability vector, and record the orthogonality residual."""
    w = np.asarray(w, dtype=float).copy()
    w[w <= clamp_ratio * float(np.max(w))] = 0.0
    w /= float(np.sum(w))
    support = tuple(int(i) for i in np.flatnonzero(w))
    coeffs = basis.coefficients(w)
    residual = max((abs(float(coeffs[j - 1])) for j in annihilated), default=0.0)
    return DesignMeasure(
        n=basis.n,
        ell=ell,
        support=support,
        weights=tuple(float(w[i]) for i in support),
        orthogonality_residual=residual,
        l2_norm_sq=float(w @ w),
        method=method,
        annihilated=annihilated,
    )


def _accept_lp_point(m: np.ndarray, x: np.ndarray, ell: int) -> np.ndarray | None:
    """Polish an LP solution and cut it to <= ell vertices; None if it misses M w = e1."""
    w = polish_support(m, np.clip(x, 0.0, None))
    if moment_residual(m, w) > _LP_RESIDUAL:
        return None
    if np.count_nonzero(w) > ell:
        w = caratheodory_reduce(m, w)
    return w


def _lp_vertex(m: np.ndarray, e1: np.ndarray, c: np.ndarray, ell: int) -> np.ndarray:
    n = m.shape[1]
    result = two_phase_simplex(m, e1, c)
    if not result.certificate.feasible:
        raise NumericalBreakdownError(
            result.certificate,
            f"simplex declared M w = e1, w >= 0 infeasible at ell={ell}, n={n}; "
            "this system is always feasible, so the solver broke down numerically",
        )
    w = _accept_lp_point(m, result.x, ell)
    if w is not None:
        return w
    logger.warning(
        f"simplex vertex at ell={ell} misses M w = e1 by {result.residual:.2e}; "
        "re-solving with the HiGHS dual simplex"
    )
    highs = scipy.optimize.linprog(c, A_eq=m, b_eq=e1, bounds=(0, None), method="highs-ds")
    w = _accept_lp_point(m, highs.x, ell) if highs.status == 0 else None
    if w is None:
        raise NumericalBreakdownError(
            result.certificate,
            f"no LP vertex of M w = e1, w >= 0 within {_LP_RESIDUAL:.0e} at ell={ell}, n={n} "
            f"(simplex residual {result.residual:.2e}, HiGHS status {highs.status})",
        )
    return w


def solve_design(
    basis: SpectralBasis,
    ell: int,
    method: str = "reduce_uniform",
    *,
    objective: Sequence[float] | np.ndarray | None = None,
) -> DesignMeasure:
    """Probability measure on at most ``ell`` vertices orthogonal to phi_2..phi_ell.

    ``reduce_uniform`` reduces the feasible point 1/sqrt(n); ``lp_vertex`` returns the
    optimal basic solution of min <c, w> s.t. M w = e1, w >= 0 (c defaults to all-ones).
    """
    m, e1 = build_moment_system(basis, ell)
    n = basis.n
    if method == "reduce_uniform":
        w = caratheodory_reduce(m, np.full(n, 1.0 / np.sqrt(n)))
    elif method == "lp_vertex":
        c = np.ones(n) if objective is None else np.asarray(objective, dtype=float)
        w = _lp_vertex(m, e1, c, ell)
    else:
        raise ValueError(f"unknown design method {method!r}; choose from {', '.join(METHODS)}")

    design = _finalize(basis, w, ell, method, tuple(range(2, ell + 1)))
    logger.debug(
        f"design ell={ell} method={method}: support={len(design.support)} "
        f"residual={design.orthogonality_residual:.2e}"
    )
    return design


def design_from_sign_pattern(basis: SpectralBasis) -> DesignMeasure:
    """Two-point ell=2 design from the extreme entries alpha > 0 > beta of phi_2."""
    if basis.n < 3:
        raise ValueError("sign-pattern design needs n >= 3 so that ell = 2 <= n - 1")
    phi2 = basis.phi(2)
    i = int(np.argmax(phi2))
    j = int(np.argmin(phi2))
    alpha, beta = float(phi2[i]), float(phi2[j])
    if not (alpha > 0.0 > beta):
        raise ValueError("phi_2 has no pair of opposite-sign entries")
    w = np.zeros(basis.n)
    w[i] = -beta / (alpha - beta)
    w[j] = alpha / (alpha - beta)
    return _finalize(basis, w, 2, "sign_pattern", (2,))


def verify_design(
    basis: SpectralBasis,
    m: DesignMeasure,
    *,
    tol: float = VERIFICATION_TOL,
) -> DesignVerification:
    """Recompute every design property from scratch against ``basis``."""
    w = m.as_vector()
    coeffs = basis.coefficients(w)
    inner = tuple(float(x) for x in coeffs[1:])
    annihilated = m.annihilated or tuple(range(2, m.ell + 1))
    residual = max((abs(float(coeffs[j - 1])) for j in annihilated), default=0.0)
    mass = float(np.sum(w))
    return DesignVerification(
        ell=m.ell,
        support_size=len(m.support),
        support_ok=len(m.support) <= m.ell,
        positive=all(x > 0.0 for x in m.weights),
        mass=mass,
        mass_ok=abs(mass - 1.0) <= 1e-12,
        inner_products=inner,
        orthogonality_residual=residual,
        orthogonality_ok=residual <= tol,
        effective_depth=orthogonality_depth(basis, w, tol=tol),
        l2_norm_sq=float(w @ w),
    )
