"""Cyclic Jacobi eigensolver for dense real symmetric matrices."""

from __future__ import annotations

import math

import numpy as np
from loguru import logger

from run_settings import JACOBI_MAX_SWEEPS, JACOBI_THRESHOLD


class EigensolverError(RuntimeError):
    """Jacobi sweeps did not drive the off-diagonal norm below threshold."""

    def __init__(self, sweeps: int, off_norm: float):
        super().__init__(
            f"Jacobi eigensolver did not converge after {sweeps} sweeps "
            f"(off-diagonal Frobenius norm {off_norm:.3e})"
        )
        self.sweeps = sweeps
        self.off_norm = off_norm


def off_diagonal_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def jacobi_eigh(
    matrix: np.ndarray,
    *,
    threshold: float = JACOBI_THRESHOLD,
    max_sweeps: int = JACOBI_MAX_SWEEPS,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Diagonalize ``matrix`` by cyclic row-order Jacobi rotations.

    Returns (eigenvalues, eigenvectors as columns, sweeps used). Convergence is declared
    when the off-diagonal Frobenius norm is at most ``threshold`` times max(1, ||A||_F).
    """
    a = np.array(matrix, dtype=float, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.allclose(a, a.T, rtol=0.0, atol=1e-12):
        raise ValueError("Jacobi eigensolver requires a symmetric matrix")
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    v = np.eye(n)
    limit = threshold * max(1.0, float(np.linalg.norm(a)))

    off = off_diagonal_norm(a)
    for sweep in range(max_sweeps + 1):
        if off <= limit:
            logger.debug(f"Jacobi converged in {sweep} sweeps (off={off:.3e}, n={n})")
            return np.diag(a).copy(), v, sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                col_p = a[:, p].copy()
                col_q = a[:, q]
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :]
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0

                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
        off = off_diagonal_norm(a)
        logger.debug(f"Jacobi sweep {sweep + 1}: off={off:.3e}")
    raise EigensolverError(max_sweeps, off)
