"""Two-phase tableau simplex (Bland's rule) for  min <c, w>  s.t.  A w = b, w >= 0."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np
from loguru import logger

_PIVOT_TOL = 1e-10


@dataclass(frozen=True)
class FeasibilityCertificate:
    """Either a feasible point ``w`` or a Farkas vector ``y`` with y^T A >= 0, y^T b < 0."""

    status: str
    w: np.ndarray | None = None
    y: np.ndarray | None = None

    @property
    def feasible(self) -> bool:
        return self.status == "feasible"

    def to_document(self) -> dict[str, Any]:
        return {
            "status": self.status,
            "w": [float(x) for x in self.w] if self.w is not None else None,
            "y": [float(x) for x in self.y] if self.y is not None else None,
        }


class NumericalBreakdownError(RuntimeError):
    """The simplex reported infeasibility for a system that is provably feasible."""

    def __init__(self, certificate: FeasibilityCertificate, message: str):
        super().__init__(message)
        self.certificate = certificate


@dataclass(frozen=True)
class SimplexResult:
    x: np.ndarray
    basic: tuple[int, ...]
    objective: float
    pivots: int
    residual: float
    certificate: FeasibilityCertificate


def _refresh(t: np.ndarray, basic: list[int], source: np.ndarray, cost: np.ndarray) -> None:
    """Rebuild tableau ``t`` for ``basic`` from the untouched rows ``source`` = [A | b].

    Redundant rows are allowed; the system is consistent, so lstsq solves it exactly.
    """
    body, *_ = np.linalg.lstsq(source[:, basic], source, rcond=None)
    t[:-1] = body
    t[-1] = cost - cost[basic] @ body


def _run(
    t: np.ndarray,
    basic: list[int],
    allowed: int,
    tol: float,
    budget: int,
    source: np.ndarray,
    cost: np.ndarray,
) -> int:
    """Bland's-rule pivots on tableau ``t`` (last row = reduced costs). Returns pivot count."""
    m = len(basic)
    pivots = 0
    while True:
        reduced = t[-1, :allowed]
        entering = next((j for j in range(allowed) if reduced[j] < -tol), None)
        if entering is None:
            return pivots
        column = t[:m, entering]
        rows = [i for i in range(m) if column[i] > tol]
        if not rows:
            raise RuntimeError(f"linear program is unbounded along column {entering}")
        ratios = [(max(float(t[i, -1]), 0.0) / column[i], basic[i], i) for i in rows]
        best = min(r[0] for r in ratios)
        leave = min((r for r in ratios if r[0] <= best + tol), key=lambda r: r[1])[2]
        basic[leave] = entering
        _refresh(t, basic, source, cost)
        pivots += 1
        if pivots > budget:
            raise RuntimeError(f"simplex exceeded {budget} pivots")


def two_phase_simplex(
    a: np.ndarray,
    b: np.ndarray,
    c: np.ndarray,
    *,
    tol: float = _PIVOT_TOL,
) -> SimplexResult:
    """Solve the standard-form LP; on infeasibility return the phase-one Farkas certificate."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    m, n = a.shape
    if b.shape != (m,) or c.shape != (n,):
        raise ValueError(f"shape mismatch: A {a.shape}, b {b.shape}, c {c.shape}")
    signs = np.where(b < 0.0, -1.0, 1.0)
    a_std = a * signs[:, None]
    b_std = b * signs
    budget = 50 * (m + n)

    # Phase one: artificials n..n+m-1 start basic; minimize their sum.
    source = np.hstack([a_std, np.eye(m), b_std[:, None]])
    cost = np.zeros(n + m + 1)
    cost[n : n + m] = 1.0
    t = np.zeros((m + 1, n + m + 1))
    basic = list(range(n, n + m))
    _refresh(t, basic, source, cost)
    pivots = _run(t, basic, n + m, tol, budget, source, cost)

    infeasibility = -float(t[-1, -1])
    if infeasibility > tol * max(1.0, float(np.max(np.abs(b_std)))):
        duals = 1.0 - t[-1, n : n + m]
        y = -duals * signs
        logger.warning(f"phase one ended with infeasibility {infeasibility:.3e}")
        return SimplexResult(
            x=np.zeros(n),
            basic=tuple(basic),
            objective=float("nan"),
            pivots=pivots,
            residual=float("nan"),
            certificate=FeasibilityCertificate(status="infeasible", y=y),
        )

    # Drive zero-level artificials out of the basis; drop rows that are redundant.
    keep = []
    for i in range(m):
        if basic[i] < n:
            keep.append(i)
            continue
        row = np.abs(t[i, :n])
        row[[j for j in basic if j < n]] = 0.0
        col = int(np.argmax(row))
        if row[col] > tol:
            basic[i] = col
            _refresh(t, basic, source, cost)
            pivots += 1
            keep.append(i)
        else:
            logger.debug(f"dropping redundant constraint row {i}")
    basic = [basic[i] for i in keep]

    # Phase two on the original columns.
    source2 = np.hstack([a_std, b_std[:, None]])
    cost2 = np.append(c, 0.0)
    t2 = np.zeros((len(basic) + 1, n + 1))
    _refresh(t2, basic, source2, cost2)
    pivots += _run(t2, basic, n, tol, budget, source2, cost2)

    x = np.zeros(n)
    for i, j in enumerate(basic):
        x[j] = max(float(t2[i, -1]), 0.0)
    residual = float(np.max(np.abs(a @ x - b))) if m else 0.0
    objective = float(c @ x)
    logger.debug(
        f"simplex finished: {pivots} pivots, objective {objective:.6g}, residual {residual:.2e}"
    )
    return SimplexResult(
        x=x,
        basic=tuple(basic),
        objective=objective,
        pivots=pivots,
        residual=residual,
        certificate=FeasibilityCertificate(status="feasible", w=x),
    )
