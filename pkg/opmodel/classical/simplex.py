"""Dense tableau simplex for box-constrained linear feasibility.

Decides whether A x = b has a solution with 0 <= x <= 1. The box is turned
into equalities with slacks (x + s = 1), rows are sign-flipped so the right
hand side is nonnegative, and phase I minimizes the sum of artificial
variables under Bland's rule, which guarantees termination.

When phase I ends with a positive objective, the simplex multipliers give a
Farkas certificate y with Mᵀy <= 0 and cᵀy > 0 for the standard-form system
M z = c. The certificate is re-verified before an infeasible verdict is
returned; numerical trouble yields ``inconclusive``, never a wrong verdict.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np

logger = logging.getLogger(__name__)

TOL_LP = 1e-8
MAX_ITERATIONS = 10_000
PIVOT_EPS = 1e-12

Status = Literal["feasible", "infeasible", "inconclusive"]


@dataclass
class FeasibilityResult:
    status: Status
    x: np.ndarray | None = None
    certificate: np.ndarray | None = None
    residual: float | None = None
    gap: float | None = None
    iterations: int = 0
    reason: str = ""

    @property
    def feasible(self) -> bool:
        return self.status == "feasible"

    @property
    def infeasible(self) -> bool:
        return self.status == "infeasible"


def _pivot(tableau: np.ndarray, row: int, col: int) -> None:
    tableau[row] /= tableau[row, col]
    others = np.arange(tableau.shape[0]) != row
    tableau[others] -= np.outer(tableau[others, col], tableau[row])


def _phase_one(
    tableau: np.ndarray, basis: list[int], n_cols: int, max_iterations: int
) -> tuple[bool, int]:
    """Run Bland's rule on ``tableau`` in place. Returns (converged, iterations)."""
    m = tableau.shape[0] - 1
    for it in range(max_iterations):
        costs = tableau[m, :n_cols]
        entering = np.flatnonzero(costs < -PIVOT_EPS)
        if entering.size == 0:
            return True, it
        col = int(entering[0])
        column = tableau[:m, col]
        candidates = np.flatnonzero(column > PIVOT_EPS)
        if candidates.size == 0:
            # phase I is bounded below by 0, so this only happens through roundoff
            return False, it
        ratios = tableau[candidates, -1] / column[candidates]
        best = ratios.min()
        ties = candidates[np.abs(ratios - best) <= PIVOT_EPS * max(1.0, abs(best))]
        row = int(min(ties, key=lambda r: basis[r]))
        _pivot(tableau, row, col)
        basis[row] = col
    return False, max_iterations


def box_feasibility(
    A: np.ndarray,
    b: np.ndarray,
    *,
    tol_lp: float = TOL_LP,
    max_iterations: int = MAX_ITERATIONS,
) -> FeasibilityResult:
    """Find x in [0,1]^n with A x = b, or a verified certificate that none exists.

    ``certificate`` on an infeasible result is the functional y on the rows
    of A: every x in the box has y·(A x) strictly below y·b.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    k, n = A.shape
    if b.size != k:
        return FeasibilityResult("inconclusive", reason=f"shape mismatch: A is {A.shape}, b has {b.size}")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        return FeasibilityResult("inconclusive", reason="non-finite input")

    # standard form M z = c, z = (x, s) >= 0
    M = np.block([[A, np.zeros((k, n))], [np.eye(n), np.eye(n)]])
    c = np.concatenate([b, np.ones(n)])
    signs = np.where(c < 0.0, -1.0, 1.0)
    M_s, c_s = M * signs[:, None], c * signs
    m, nz = M_s.shape

    tableau = np.zeros((m + 1, nz + m + 1))
    tableau[:m, :nz] = M_s
    tableau[:m, nz : nz + m] = np.eye(m)
    tableau[:m, -1] = c_s
    tableau[m, :nz] = -M_s.sum(axis=0)
    tableau[m, -1] = -c_s.sum()
    basis = list(range(nz, nz + m))

    converged, iterations = _phase_one(tableau, basis, nz + m, max_iterations)
    if not converged:
        logger.warning("simplex stopped after %d iterations without convergence", iterations)
        return FeasibilityResult("inconclusive", iterations=iterations, reason="NO_CONVERGENCE")

    objective = -tableau[m, -1]
    if objective <= tol_lp:
        z = np.zeros(nz + m)
        for row, var in enumerate(basis):
            z[var] = tableau[row, -1]
        x = np.clip(z[:n], 0.0, 1.0)
        residual = float(np.max(np.abs(A @ x - b))) if k else 0.0
        if residual <= tol_lp:
            return FeasibilityResult("feasible", x=x, residual=residual, iterations=iterations)
        return FeasibilityResult(
            "inconclusive", x=x, residual=residual, iterations=iterations, reason="RESIDUAL_ABOVE_TOL"
        )

    # multipliers y_i = 1 - reduced cost of artificial i, undone for the row flips
    y = signs * (1.0 - tableau[m, nz : nz + m])
    scale = float(np.max(np.abs(y))) or 1.0
    y = y / scale
    slack = float(np.max(M.T @ y))
    gap = float(c @ y)
    if slack <= tol_lp and gap > tol_lp:
        return FeasibilityResult("infeasible", certificate=y[:k], gap=gap, iterations=iterations)
    logger.warning("infeasibility certificate failed verification (slack=%.3e gap=%.3e)", slack, gap)
    return FeasibilityResult("inconclusive", iterations=iterations, reason="CERTIFICATE_UNVERIFIED")
