"""Moment system M w = e1 and Caratheodory support reduction."""

from __future__ import annotations

from collections.abc import Callable

import numpy as np
import scipy.linalg
from loguru import logger

from run_settings import NULLSPACE_RCOND, ZERO_CLAMP_RATIO
from spectral import SpectralBasis

# Largest negative entry tolerated after a reduction step before it is an internal error.
_NEGATIVE_SLACK = 1e-12
# Feasibility slack on the incoming M w = e1.
_INPUT_RESIDUAL = 1e-10


class NullSpaceError(RuntimeError):
    """Restricted moment matrix looked full column rank while support exceeded its rows."""


class ReductionError(RuntimeError):
    """A reduction step produced an entry below -1e-12."""


def build_moment_system(basis: SpectralBasis, ell: int) -> tuple[np.ndarray, np.ndarray]:
    """Rows phi_1..phi_ell of the basis, and e1 in R^ell."""
    n = basis.n
    if not 1 <= ell <= n - 1:
        raise ValueError(f"ell must lie in 1..{n - 1}, got {ell}")
    m = np.array(basis.vectors[:ell], copy=True)
    e1 = np.zeros(ell)
    e1[0] = 1.0
    return m, e1


def moment_residual(m: np.ndarray, w: np.ndarray) -> float:
    e1 = np.zeros(m.shape[0])
    e1[0] = 1.0
    return float(np.max(np.abs(m @ w - e1)))


def _clamp_small(w: np.ndarray, ratio: float) -> np.ndarray:
    top = float(np.max(w)) if w.size else 0.0
    out = w.copy()
    out[out <= ratio * top] = 0.0
    return out


def _null_vector(restricted: np.ndarray, rcond: float) -> np.ndarray:
    basis = scipy.linalg.null_space(restricted, rcond=rcond)
    if basis.shape[1] == 0:
        raise NullSpaceError(
            f"restricted {restricted.shape[0]}x{restricted.shape[1]} moment matrix is numerically "
            f"full column rank at rcond={rcond:.0e}; check the rank tolerance"
        )
    return basis[:, 0]


def polish_support(m: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Re-solve M_S w_S = e1 on the final support; keep it only if it stays positive and helps."""
    support = np.flatnonzero(w)
    if support.size == 0:
        return w
    e1 = np.zeros(m.shape[0])
    e1[0] = 1.0
    solved, *_ = np.linalg.lstsq(m[:, support], e1, rcond=None)
    if np.all(solved > 0.0):
        candidate = np.zeros_like(w)
        candidate[support] = solved
        if moment_residual(m, candidate) <= moment_residual(m, w):
            return candidate
    return w


def caratheodory_reduce(
    m: np.ndarray,
    w: np.ndarray,
    *,
    rcond: float = NULLSPACE_RCOND,
    clamp_ratio: float = ZERO_CLAMP_RATIO,
    on_step: Callable[[np.ndarray], None] | None = None,
) -> np.ndarray:
    """Shrink a nonnegative solution of M w = e1 to at most ell = rows(M) positive entries.

    Each step moves along a null vector z of M restricted to the support, by the largest
    step keeping w >= 0; every coordinate that reaches zero is dropped.
    ``on_step`` receives a copy of w after each step.
    """
    m = np.asarray(m, dtype=float)
    w = np.array(w, dtype=float, copy=True)
    ell, n = m.shape
    if w.shape != (n,):
        raise ValueError(f"weight vector must have length {n}, got shape {w.shape}")
    if np.any(w < 0.0):
        raise ValueError("caratheodory_reduce requires w >= 0")
    residual = moment_residual(m, w)
    if residual > _INPUT_RESIDUAL:
        raise ValueError(f"input does not satisfy M w = e1 (residual {residual:.3e})")

    w = _clamp_small(w, clamp_ratio)
    support = np.flatnonzero(w)
    steps = 0
    while support.size > ell:
        z = _null_vector(m[:, support], rcond)
        floor = 1e-13 * float(np.max(np.abs(z)))
        if not np.any(z > floor):
            z = -z
        positive = z > floor
        ratios = np.full(support.size, np.inf)
        ratios[positive] = w[support][positive] / z[positive]
        t = float(np.min(ratios))
        hit = ratios <= t
        stepped = w[support] - t * z
        stepped[hit] = 0.0
        if np.any(stepped < -_NEGATIVE_SLACK):
            raise ReductionError(
                f"reduction step {steps + 1} produced entry {float(np.min(stepped)):.3e} < -1e-12"
            )
        stepped[stepped < 0.0] = 0.0
        w[support] = stepped
        w = _clamp_small(w, clamp_ratio)
        new_support = np.flatnonzero(w)
        steps += 1
        logger.debug(
            f"reduce step {steps}: support {support.size} -> {new_support.size} "
            f"(residual {moment_residual(m, w):.2e})"
        )
        support = new_support
        if on_step is not None:
            on_step(w.copy())

    return polish_support(m, w)


def basic_signed_solution(basis: SpectralBasis, ell: int) -> np.ndarray:
    """w = (N^-1 e1, 0) for an ell x ell nonsingular column subset N of M.

    Solves M w = e1 with at most ell nonzeros but ignores the sign constraint; columns
    are chosen by QR with column pivoting.
    """
    m, e1 = build_moment_system(basis, ell)
    _, _, piv = scipy.linalg.qr(m, pivoting=True, mode="economic")
    cols = np.sort(piv[:ell])
    w = np.zeros(basis.n)
    w[cols] = np.linalg.solve(m[:, cols], e1)
    return w
