"""Generalized probability measures on the full effect set.

A valuation v: E_q -> [0,1] that is normalized and additive on orthogonal
effects extends to a linear functional and is therefore a trace rule
v(a) = tr[rho a]. Countable additivity adds nothing in finite dimension, so
the checks below only test finite additivity.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from opmodel.quantum.hilbert import from_coords, identity, ket, projector, random_effect, to_coords
from opmodel.quantum.operators import (
    TOL,
    TOL_PSD,
    DensityOperator,
    EffectOperator,
    ValidationReport,
    as_matrix,
    pair_raw,
    validate,
)
from opmodel.utils import OpModelError, as_rng

logger = logging.getLogger(__name__)

Rule = Callable[[np.ndarray], float]

ADDITIVITY_NOTE = "sigma-additivity reduces to finite additivity in finite dimension"


# ── Spanning families ─────────────────────────────────────────────────

def _off_diagonal_projections(d: int) -> list[np.ndarray]:
    out = []
    for j in range(d):
        for k in range(j + 1, d):
            out.append(projector(ket(d, j) + ket(d, k)))
            out.append(projector(ket(d, j) + 1j * ket(d, k)))
    return out


def projection_family(d: int) -> list[np.ndarray]:
    """d² rank-1 projections spanning the Hermitian operators (unscaled)."""
    if d < 2:
        raise OpModelError("DIMENSION_MISMATCH", f"d must be >= 2, got {d}")
    diagonal = [projector(ket(d, j)) for j in range(d)]
    return diagonal + _off_diagonal_projections(d)


def effect_operator_basis(d: int) -> list[EffectOperator]:
    """d² linearly independent effects whose sum stays below I.

    I, the off-diagonal projections and all but the last diagonal projector,
    each scaled by 1/d². For d = 2 the unscaled family is I, (I+σ1)/2,
    (I+σ2)/2, (I+σ3)/2.
    """
    if d < 2:
        raise OpModelError("DIMENSION_MISMATCH", f"d must be >= 2, got {d}")
    family = [identity(d)] + _off_diagonal_projections(d) + [projector(ket(d, j)) for j in range(d - 1)]
    scale = 1.0 / d**2
    return [EffectOperator(scale * m) for m in family]


# ── Valuations ────────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class EffectValuation:
    """Values of v on a finite generating family, plus v(I)."""

    dim: int
    family: tuple[np.ndarray, ...]
    values: np.ndarray
    unit_value: float = 1.0

    def __post_init__(self) -> None:
        family = tuple(as_matrix(a) for a in self.family)
        values = np.asarray(self.values, dtype=float).reshape(-1)
        if len(family) != values.size:
            raise OpModelError("DIMENSION_MISMATCH", f"{len(family)} effects vs {values.size} values")
        if any(a.shape != (self.dim, self.dim) for a in family):
            raise OpModelError("DIMENSION_MISMATCH", f"family must be {self.dim}x{self.dim}")
        if np.any(values < -TOL) or np.any(values > 1.0 + TOL):
            raise OpModelError("INVALID_VALUATION", "values must lie in [0,1]")
        if abs(self.unit_value - 1.0) > TOL:
            raise OpModelError("INVALID_VALUATION", f"v(I) = {self.unit_value}, expected 1")
        for a, value in zip(family, values):
            if np.max(np.abs(a)) <= TOL and abs(value) > TOL:
                raise OpModelError("INVALID_VALUATION", "v(O) must be 0")
        values.setflags(write=False)
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "values", values)


def trace_rule(rho: Any) -> Rule:
    """a ↦ tr[rho a]."""
    r = as_matrix(rho)

    def rule(a: np.ndarray) -> float:
        return pair_raw(r, a).real

    return rule


def squared_rule(rho: Any) -> Rule:
    """a ↦ tr[rho a]², normalized but not additive."""
    linear = trace_rule(rho)

    def rule(a: np.ndarray) -> float:
        return linear(a) ** 2

    return rule


def valuation_from_rule(rule: Rule, family: Sequence[Any]) -> EffectValuation:
    mats = [as_matrix(a) for a in family]
    d = mats[0].shape[0]
    return EffectValuation(
        dim=d,
        family=tuple(mats),
        values=np.array([rule(a) for a in mats]),
        unit_value=rule(identity(d)),
    )


# ── Reconstruction ────────────────────────────────────────────────────

@dataclass
class ValuationReconstruction:
    matrix: np.ndarray
    residual: float
    report: ValidationReport

    @property
    def valid(self) -> bool:
        return self.report.valid

    @property
    def state(self) -> DensityOperator:
        if not self.valid:
            raise OpModelError("INVALID_STATE", ",".join(self.report.flags))
        return DensityOperator(self.matrix)


def state_from_valuation(
    v: EffectValuation, *, tol: float = TOL, tol_psd: float = TOL_PSD
) -> ValuationReconstruction:
    """Solve tr[rho a_k] = v(a_k), tr[rho] = v(I) for rho in Hilbert–Schmidt coordinates.

    A family that does not span the Hermitian operators raises RANK_DEFICIENT.
    A basis of exactly d² effects is solved on its own, so tr[rho] is whatever
    the values force and a bad trace shows up as TRACE_NOT_ONE. A larger family
    also carries the v(I) row, and values with no exact solution raise
    INCONSISTENT_VALUES. A solution that is not a state is returned with its
    validation report (v was not a generalized probability measure).
    """
    d = v.dim
    family_rows = np.stack([to_coords(a) for a in v.family])
    rank = int(np.linalg.matrix_rank(family_rows, tol=tol))
    if rank < d * d:
        raise OpModelError("RANK_DEFICIENT", f"family rank {rank} < {d * d}")
    if len(v.family) == d * d:
        rows, rhs = family_rows, np.asarray(v.values, dtype=float)
        coords = np.linalg.solve(rows, rhs)
    else:
        rows = np.vstack([family_rows, to_coords(identity(d))])
        rhs = np.concatenate([v.values, [v.unit_value]])
        coords, *_ = np.linalg.lstsq(rows, rhs, rcond=None)
    residual = float(np.max(np.abs(rows @ coords - rhs)))
    if len(v.family) > d * d and residual > tol:
        raise OpModelError("INCONSISTENT_VALUES", f"least-squares residual {residual:.3e}")

    matrix = from_coords(coords, d)
    report = validate(matrix, "state", tol=tol, tol_psd=tol_psd)
    if not report.valid:
        logger.warning("valuation rejected: reconstruction is not a state (%s)", ",".join(report.flags))
    return ValuationReconstruction(matrix=matrix, residual=residual, report=report)


# ── Additivity ────────────────────────────────────────────────────────

@dataclass
class AdditivityReport:
    trials: int
    max_defect: float
    worst_trial: int | None
    normalization_defect: float
    tol: float
    note: str = ADDITIVITY_NOTE
    flags: list[str] = field(default_factory=list)

    @property
    def additive(self) -> bool:
        return not self.flags

    def as_dict(self) -> dict[str, Any]:
        return {
            "trials": self.trials,
            "max_defect": self.max_defect,
            "worst_trial": self.worst_trial,
            "normalization_defect": self.normalization_defect,
            "tol": self.tol,
            "additive": self.additive,
            "flags": list(self.flags),
            "note": self.note,
        }


def verify_additivity(
    rule: Rule,
    d: int,
    trials: int,
    seed: int | np.random.Generator | None = None,
    *,
    tol: float = TOL,
) -> AdditivityReport:
    """Check v(a ⊕ b) = v(a) + v(b) on random orthogonal pairs.

    Pairs are a = λc, b = (1-λ)e for random effects c, e and λ in (0,1),
    so a + b <= I always holds.
    """
    rng = as_rng(seed)
    normalization = max(abs(rule(identity(d)) - 1.0), abs(rule(np.zeros((d, d), dtype=complex))))
    max_defect, worst = 0.0, None
    for t in range(trials):
        lam = rng.uniform(0.0, 1.0)
        a = lam * random_effect(d, rng)
        b = (1.0 - lam) * random_effect(d, rng)
        defect = abs(rule(a + b) - rule(a) - rule(b))
        if defect > max_defect:
            max_defect, worst = defect, t
    flags = []
    if normalization > tol:
        flags.append("NOT_NORMALIZED")
    if max_defect > tol:
        flags.append("NOT_ADDITIVE")
    return AdditivityReport(
        trials=trials,
        max_defect=max_defect,
        worst_trial=worst,
        normalization_defect=normalization,
        tol=tol,
        flags=flags,
    )
