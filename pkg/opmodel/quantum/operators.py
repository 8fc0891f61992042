"""Dense operator core for the quantum statistical model <S_q, E_q>.

States are density operators, effects are operators O <= a <= I, observables
are POVMs. Probabilities come from the trace formula a(rho) = tr[rho a].
Validation never raises; the typed wrappers raise ``OpModelError`` when their
validation report fails.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Literal, Sequence

import numpy as np

from opmodel.quantum.hilbert import identity, to_coords
from opmodel.utils import OpModelError

logger = logging.getLogger(__name__)

TOL = 1e-9
TOL_PSD = 1e-9

Kind = Literal["state", "effect", "povm-element"]


def as_matrix(x: Any) -> np.ndarray:
    """Complex ndarray view of a wrapper or array-like."""
    if hasattr(x, "matrix"):
        x = x.matrix
    return np.asarray(x, dtype=complex)


def _require_same_dim(x: np.ndarray, y: np.ndarray) -> None:
    if x.shape != y.shape:
        raise OpModelError("DIMENSION_MISMATCH", f"{x.shape} vs {y.shape}")


# ── Validation ────────────────────────────────────────────────────────

@dataclass
class ValidationReport:
    kind: str
    dim: int
    hermiticity_defect: float
    trace_defect: float | None
    eig_min: float
    eig_max: float
    flags: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.flags

    def as_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "dim": self.dim,
            "hermiticity_defect": self.hermiticity_defect,
            "trace_defect": self.trace_defect,
            "eig_min": self.eig_min,
            "eig_max": self.eig_max,
            "flags": list(self.flags),
            "valid": self.valid,
        }


def validate(
    x: Any, kind: Kind = "state", *, tol: float = TOL, tol_psd: float = TOL_PSD
) -> ValidationReport:
    """Check Hermiticity, trace (states) and the eigenvalue range for ``kind``."""
    m = as_matrix(x)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        return ValidationReport(kind, 0, float("nan"), None, float("nan"), float("nan"), ["NOT_SQUARE"])
    d = m.shape[0]
    if not np.all(np.isfinite(m)):
        return ValidationReport(kind, d, float("nan"), None, float("nan"), float("nan"), ["NON_FINITE"])

    flags: list[str] = []
    herm_defect = float(np.max(np.abs(m - m.conj().T)))
    if herm_defect > tol:
        flags.append("NON_HERMITIAN")
    eigs = np.linalg.eigvalsh((m + m.conj().T) / 2.0)
    eig_min, eig_max = float(eigs[0]), float(eigs[-1])

    trace_defect: float | None = None
    if kind == "state":
        trace_defect = float(abs(np.trace(m) - 1.0))
        if trace_defect > tol:
            flags.append("TRACE_NOT_ONE")
        if eig_min < -tol_psd:
            flags.append("NEGATIVE_EIGENVALUE")
    else:
        if eig_min < -tol_psd:
            flags.append("NEGATIVE_EIGENVALUE")
        if eig_max > 1.0 + tol_psd:
            flags.append("EIGENVALUE_ABOVE_ONE")
    return ValidationReport(kind, d, herm_defect, trace_defect, eig_min, eig_max, flags)


# ── Typed wrappers ────────────────────────────────────────────────────

def _freeze(m: np.ndarray) -> np.ndarray:
    m = np.array(m, dtype=complex, copy=True)
    m.setflags(write=False)
    return m


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """A state rho in S_q: Hermitian, trace one, positive semidefinite."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = _freeze(as_matrix(self.matrix))
        report = validate(m, "state")
        if not report.valid:
            raise OpModelError("INVALID_STATE", ",".join(report.flags))
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def purity(self) -> float:
        return float(np.einsum("ij,ji->", self.matrix, self.matrix).real)


@dataclass(frozen=True, eq=False)
class EffectOperator:
    """An effect a in E_q: O <= a <= I."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = _freeze(as_matrix(self.matrix))
        report = validate(m, "effect")
        if not report.valid:
            raise OpModelError("INVALID_EFFECT", ",".join(report.flags))
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass
class PovmReport:
    element_reports: list[ValidationReport]
    normalization_defect: float
    flags: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.flags


def validate_povm(effects: Any, *, tol: float = TOL, tol_psd: float = TOL_PSD) -> PovmReport:
    """Element-wise effect validity plus ||Σ a_k - I|| <= tol."""
    items = effects.effects if isinstance(effects, Povm) else effects
    mats = [as_matrix(e) for e in items]
    if not mats:
        return PovmReport([], float("nan"), ["EMPTY"])
    shapes = {m.shape for m in mats}
    if len(shapes) != 1:
        return PovmReport([], float("nan"), ["DIMENSION_MISMATCH"])
    reports = [validate(m, "povm-element", tol=tol, tol_psd=tol_psd) for m in mats]
    flags: list[str] = []
    if any(not r.valid for r in reports):
        flags.append("INVALID_ELEMENT")
    d = mats[0].shape[0]
    defect = float(np.max(np.abs(np.sum(mats, axis=0) - identity(d))))
    if defect > tol:
        flags.append("NOT_NORMALIZED")
    return PovmReport(reports, defect, flags)


@dataclass(frozen=True, eq=False)
class Povm:
    """Effect-valued measure on a finite outcome set, Σ_k a_k = I."""

    effects: tuple[EffectOperator, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        report = validate_povm([as_matrix(e) for e in self.effects])
        if not report.valid:
            raise OpModelError("INVALID_POVM", ",".join(report.flags))
        effects = tuple(e if isinstance(e, EffectOperator) else EffectOperator(e) for e in self.effects)
        labels = tuple(self.labels) or tuple(str(k) for k in range(len(effects)))
        if len(labels) != len(effects):
            raise OpModelError("INVALID_POVM", "label count differs from effect count")
        object.__setattr__(self, "effects", effects)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.effects[0].dim

    def __len__(self) -> int:
        return len(self.effects)

    def element(self, mask: int) -> np.ndarray:
        """E(X) for the outcome subset encoded as a bitmask."""
        total = np.zeros((self.dim, self.dim), dtype=complex)
        for k, e in enumerate(self.effects):
            if mask >> k & 1:
                total = total + e.matrix
        return total

    def coordinate_matrix(self) -> np.ndarray:
        """m × d² matrix of Hilbert–Schmidt coordinates of the elements."""
        return np.stack([to_coords(e.matrix) for e in self.effects])


# ── Pairing ───────────────────────────────────────────────────────────

def pair_raw(rho: Any, a: Any) -> complex:
    """Unclamped tr[rho a]."""
    r, e = as_matrix(rho), as_matrix(a)
    _require_same_dim(r, e)
    return complex(np.einsum("ij,ji->", r, e))


def pair(rho: Any, a: Any, *, tol: float = TOL) -> float:
    """Probability a(rho) = tr[rho a], clamped into [0, 1]."""
    raw = pair_raw(rho, a)
    if abs(raw.imag) > tol:
        logger.warning("pairing has imaginary residue %.3e; operands may not be Hermitian", raw.imag)
    return float(min(1.0, max(0.0, raw.real)))


def povm_probabilities(rho: Any, povm: Povm) -> np.ndarray:
    """Outcome distribution (tr[rho a_k])_k of the observable A^E at rho."""
    r = as_matrix(rho)
    _require_same_dim(r, povm.effects[0].matrix)
    return np.array([pair_raw(r, e).real for e in povm.effects])


# ── Effect algebra ────────────────────────────────────────────────────

def effect_complement(a: Any) -> EffectOperator:
    """a' = I - a."""
    m = as_matrix(a) if isinstance(a, EffectOperator) else EffectOperator(as_matrix(a)).matrix
    return EffectOperator(identity(m.shape[0]) - m)


def effect_osum(a: Any, b: Any, *, tol_psd: float = TOL_PSD) -> EffectOperator | None:
    """a ⊕ b = a + b when a + b <= I, else None (undefined)."""
    x, y = as_matrix(a), as_matrix(b)
    _require_same_dim(x, y)
    total = x + y
    if not validate(total, "effect", tol_psd=tol_psd).valid:
        return None
    return EffectOperator(total)


def effect_leq(a: Any, b: Any, *, tol_psd: float = TOL_PSD) -> bool:
    """Operator order a <= b, i.e. b - a >= O."""
    x, y = as_matrix(a), as_matrix(b)
    _require_same_dim(x, y)
    diff = y - x
    return bool(np.linalg.eigvalsh((diff + diff.conj().T) / 2.0)[0] >= -tol_psd)


def weakly_orthogonal(a: Any, b: Any, *, tol_psd: float = TOL_PSD) -> bool:
    """a ⊥ b iff a + b <= I."""
    return effect_osum(a, b, tol_psd=tol_psd) is not None


def is_common_lower_bound(c: Any, a: Any, b: Any, *, tol: float = TOL) -> bool:
    """O <= c <= a, c <= b with c nonzero."""
    m = as_matrix(c)
    nonzero = float(np.max(np.abs(m))) > tol
    positive = effect_leq(np.zeros_like(m), m)
    return nonzero and positive and effect_leq(m, a) and effect_leq(m, b)


def is_projection(a: Any, *, tol: float = TOL) -> bool:
    m = as_matrix(a)
    return bool(np.max(np.abs(m @ m - m)) <= tol and np.max(np.abs(m - m.conj().T)) <= tol)


# ── Compound systems ──────────────────────────────────────────────────

def tensor(x: Any, y: Any) -> Any:
    """Kronecker product; states stay states and effects stay effects."""
    k = np.kron(as_matrix(x), as_matrix(y))
    if isinstance(x, DensityOperator) and isinstance(y, DensityOperator):
        return DensityOperator(k)
    if isinstance(x, EffectOperator) and isinstance(y, EffectOperator):
        return EffectOperator(k)
    return k


def partial_trace_matrix(
    x: Any, dims: tuple[int, int], keep: Literal["first", "second"] = "first"
) -> np.ndarray:
    """Partial trace of any d1·d2 operator; linear on the whole operator space."""
    m = as_matrix(x)
    d1, d2 = dims
    if m.shape != (d1 * d2, d1 * d2):
        raise OpModelError("FACTORIZATION", f"shape {m.shape} does not factor as {d1}x{d2}")
    t = m.reshape(d1, d2, d1, d2)
    if keep == "first":
        return np.einsum("ijkj->ik", t)
    if keep == "second":
        return np.einsum("ijil->jl", t)
    raise OpModelError("FACTORIZATION", f"keep must be 'first' or 'second', got {keep!r}")


def partial_trace(
    rho: DensityOperator, dims: tuple[int, int], keep: Literal["first", "second"] = "first"
) -> DensityOperator:
    """Reduced state; pair(partial_trace(rho), a) == pair(rho, a ⊗ I)."""
    return DensityOperator(partial_trace_matrix(rho, dims, keep))


# ── Norms ─────────────────────────────────────────────────────────────

def trace_norm(x: Any, hermitian: bool = True, *, tol: float = TOL) -> float:
    """||x||_1 = tr|x|: absolute eigenvalues for Hermitian x, singular values otherwise."""
    m = as_matrix(x)
    if hermitian:
        if float(np.max(np.abs(m - m.conj().T))) > tol:
            raise OpModelError("NON_HERMITIAN", "trace_norm called with hermitian=True")
        return float(np.sum(np.abs(np.linalg.eigvalsh((m + m.conj().T) / 2.0))))
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def mixture(states: Sequence[Any], weights: Sequence[float]) -> DensityOperator:
    """Convex combination Σ λ_i rho_i."""
    mats = np.stack([as_matrix(s) for s in states])
    w = np.asarray(weights, dtype=float)
    return DensityOperator(np.einsum("i,ijk->jk", w, mats))
