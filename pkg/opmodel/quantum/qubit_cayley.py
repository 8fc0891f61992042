"""Cayley (Bloch) parameterization of the C² statistical model.

States rho = ½(r0 I + r·σ) with r0 = 1, |r| <= 1 fill a unit ball in the
hyperplane r0 = 1 of R⁴. Effects a = ½(a0 I + a·σ) fill the "diamond"
0 <= ½(a0 ± |a|) <= 1. The pairing is tr[rho a] = ½(a0 + a·r).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from opmodel.quantum.operators import TOL, DensityOperator, EffectOperator, as_matrix
from opmodel.utils import OpModelError, as_rng

# ── Pauli basis ───────────────────────────────────────────────────────

I2 = np.eye(2, dtype=complex)
SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (I2, SIGMA_1, SIGMA_2, SIGMA_3)
SIGMA = np.stack(PAULI[1:])
for _m in PAULI:
    _m.setflags(write=False)


def _vec3(v: Sequence[float]) -> np.ndarray:
    arr = np.asarray(v, dtype=float).reshape(-1)
    if arr.shape != (3,):
        raise OpModelError("DIMENSION_MISMATCH", f"expected a 3-vector, got shape {arr.shape}")
    return arr


def sigma_dot(v: Sequence[float]) -> np.ndarray:
    """v·σ."""
    return np.einsum("k,kij->ij", _vec3(v).astype(complex), SIGMA)


# ── Domain types ──────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class BlochState:
    """(r0, r) with r0 = 1 and |r| <= 1."""

    r: np.ndarray
    r0: float = 1.0

    def __post_init__(self) -> None:
        r = _vec3(self.r)
        if self.r0 != 1.0:
            raise OpModelError("INVALID_STATE", f"r0 must be 1, got {self.r0}")
        if np.linalg.norm(r) > 1.0 + TOL:
            raise OpModelError("BLOCH_OUT_OF_BALL", f"|r| = {np.linalg.norm(r):.12g} > 1")
        r.setflags(write=False)
        object.__setattr__(self, "r", r)

    @property
    def tilde(self) -> np.ndarray:
        return np.concatenate([[self.r0], self.r])


def diamond_violations(a0: float, a: Sequence[float], *, tol: float = TOL) -> list[str]:
    """Names of the failed inequalities among 0 <= ½(a0 ± |a|) <= 1."""
    n = float(np.linalg.norm(_vec3(a)))
    lo, hi = 0.5 * (a0 - n), 0.5 * (a0 + n)
    failed = []
    if lo < -tol:
        failed.append("LOWER_EIGENVALUE_NEGATIVE")
    if hi < -tol:
        failed.append("UPPER_EIGENVALUE_NEGATIVE")
    if lo > 1.0 + tol:
        failed.append("LOWER_EIGENVALUE_ABOVE_ONE")
    if hi > 1.0 + tol:
        failed.append("UPPER_EIGENVALUE_ABOVE_ONE")
    return failed


@dataclass(frozen=True, eq=False)
class CayleyEffect:
    """(a0, a) inside the effect diamond."""

    a0: float
    a: np.ndarray

    def __post_init__(self) -> None:
        a = _vec3(self.a)
        failed = diamond_violations(self.a0, a)
        if failed:
            raise OpModelError("DIAMOND_VIOLATION", ",".join(failed))
        a.setflags(write=False)
        object.__setattr__(self, "a0", float(self.a0))
        object.__setattr__(self, "a", a)

    @property
    def tilde(self) -> np.ndarray:
        return np.concatenate([[self.a0], self.a])


# ── Operations ────────────────────────────────────────────────────────

def cayley_decompose(x: Any, *, tol: float = TOL) -> tuple[float, np.ndarray]:
    """x = ½(x0 I + x·σ) with x0 = tr[x], x_k = tr[x σ_k]."""
    m = as_matrix(x)
    if m.shape != (2, 2):
        raise OpModelError("DIMENSION_MISMATCH", f"expected 2x2, got {m.shape}")
    if float(np.max(np.abs(m - m.conj().T))) > tol:
        raise OpModelError("NON_HERMITIAN", "cayley_decompose needs a Hermitian matrix")
    coeffs = np.einsum("kij,ji->k", np.stack(PAULI), m).real
    return float(coeffs[0]), coeffs[1:]


def cayley_matrix(x0: float, x: Sequence[float]) -> np.ndarray:
    """½(x0 I + x·σ) for any real (x0, x)."""
    return 0.5 * (x0 * I2 + sigma_dot(x))


def state_from_bloch(r: Sequence[float]) -> DensityOperator:
    s = BlochState(np.asarray(r, dtype=float))
    return DensityOperator(cayley_matrix(1.0, s.r))


def bloch_vector(rho: Any) -> np.ndarray:
    _, r = cayley_decompose(rho)
    return r


def effect_from_cayley(a0: float, a: Sequence[float]) -> EffectOperator:
    e = CayleyEffect(a0, np.asarray(a, dtype=float))
    return EffectOperator(cayley_matrix(e.a0, e.a))


def cayley_pair(s: BlochState, e: CayleyEffect) -> float:
    """½(a0 r0 + a·r)."""
    return 0.5 * (e.a0 * s.r0 + float(np.dot(e.a, s.r)))


def cayley_norm(a0: float, a: Sequence[float]) -> float:
    """max{|a0|, |a|}, the image of the trace norm under the Cayley map."""
    return max(abs(a0), float(np.linalg.norm(_vec3(a))))


def projection_from_direction(u: Sequence[float], *, tol: float = TOL) -> EffectOperator:
    """½(I + u·σ) for a unit vector u."""
    v = _vec3(u)
    if abs(np.linalg.norm(v) - 1.0) > tol:
        raise OpModelError("NON_UNIT_DIRECTION", f"|u| = {np.linalg.norm(v):.12g}")
    return EffectOperator(cayley_matrix(1.0, v))


def separating_effect(rho: Any, rho2: Any) -> EffectOperator:
    """½(I + u·σ) with u along r - r'; tells distinct qubit states apart."""
    diff = bloch_vector(rho) - bloch_vector(rho2)
    norm = float(np.linalg.norm(diff))
    if norm == 0.0:
        raise OpModelError("INDISTINGUISHABLE", "states coincide")
    return projection_from_direction(diff / norm)


# ── Samplers ──────────────────────────────────────────────────────────

def sample_ball(seed: int | np.random.Generator | None, n: int) -> np.ndarray:
    """n points uniform in the unit ball by rejection from the cube."""
    rng = as_rng(seed)
    out: list[np.ndarray] = []
    while len(out) < n:
        pts = rng.uniform(-1.0, 1.0, size=(2 * n, 3))
        out.extend(pts[np.linalg.norm(pts, axis=1) <= 1.0])
    return np.asarray(out[:n])


def sample_sphere(seed: int | np.random.Generator | None, n: int) -> np.ndarray:
    rng = as_rng(seed)
    g = rng.standard_normal((n, 3))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def sample_diamond(seed: int | np.random.Generator | None, n: int) -> np.ndarray:
    """n rows (a0, a) uniform in the effect diamond, rejection from [0,2]×[-1,1]³."""
    rng = as_rng(seed)
    out: list[np.ndarray] = []
    while len(out) < n:
        a0 = rng.uniform(0.0, 2.0, size=(4 * n, 1))
        a = rng.uniform(-1.0, 1.0, size=(4 * n, 3))
        norm = np.linalg.norm(a, axis=1, keepdims=True)
        keep = ((a0 - norm) >= 0.0) & ((a0 + norm) <= 2.0)
        out.extend(np.hstack([a0, a])[keep[:, 0]])
    return np.asarray(out[:n])
