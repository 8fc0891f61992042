"""Finite classical statistical models.

States are probability vectors (the simplex), effects are [0,1]-vectors (the
hypercube), observables are Markov kernels. A sharp random variable F is the
deterministic kernel K(k, X) = χ_{F⁻¹(X)}(k); any other kernel is a fuzzy
random variable. Outcome subsets X are bitmasks over at most 63 outcomes.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from opmodel.utils import OpModelError

logger = logging.getLogger(__name__)

TOL = 1e-9
MAX_OUTCOMES = 63


def _vector(values: Sequence[float]) -> np.ndarray:
    v = np.array(values, dtype=float, copy=True).reshape(-1)
    if v.size == 0 or not np.all(np.isfinite(v)):
        raise OpModelError("INVALID_VECTOR", "empty or non-finite entries")
    return v


# ── Domain types ──────────────────────────────────────────────────────

@dataclass(frozen=True)
class FiniteOutcomeSpace:
    size: int
    labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.size < 1:
            raise OpModelError("INVALID_SPACE", f"size must be positive, got {self.size}")
        labels = tuple(self.labels) or tuple(str(k + 1) for k in range(self.size))
        if len(labels) != self.size or len(set(labels)) != self.size:
            raise OpModelError("INVALID_SPACE", "labels must be distinct and match size")
        object.__setattr__(self, "labels", labels)


@dataclass(frozen=True, eq=False)
class ClassicalState:
    """p_k >= 0, Σ p_k = 1. Entries in (-tol, 0) are clamped to 0 with a warning."""

    p: np.ndarray
    clamped: float = field(default=0.0, init=False)

    def __post_init__(self) -> None:
        p = _vector(self.p)
        if np.any(p < -TOL):
            raise OpModelError("INVALID_STATE", f"negative probability {p.min():.3e}")
        if abs(p.sum() - 1.0) > TOL:
            raise OpModelError("INVALID_STATE", f"probabilities sum to {p.sum():.12g}")
        negative = p < 0.0
        if np.any(negative):
            clamped = float(-p[negative].sum())
            logger.warning("clamping %d negative probabilities (total %.3e) to 0", int(negative.sum()), clamped)
            p[negative] = 0.0
            object.__setattr__(self, "clamped", clamped)
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @property
    def size(self) -> int:
        return self.p.size


@dataclass(frozen=True, eq=False)
class ClassicalEffect:
    """0 <= a_k <= 1. Effects built by kernel_effect keep their kernel and subset."""

    a: np.ndarray
    kernel: MarkovKernel | None = field(default=None, repr=False)
    mask: int = 0

    def __post_init__(self) -> None:
        a = _vector(self.a)
        if np.any(a < -TOL) or np.any(a > 1.0 + TOL):
            raise OpModelError("INVALID_EFFECT", f"entries outside [0,1]: [{a.min():.3e}, {a.max():.3e}]")
        a.setflags(write=False)
        object.__setattr__(self, "a", a)

    @property
    def size(self) -> int:
        return self.a.size


@dataclass(frozen=True, eq=False)
class MarkovKernel:
    """Row-stochastic n×m matrix; rows are source points, columns outcomes."""

    K: np.ndarray

    def __post_init__(self) -> None:
        k = np.array(self.K, dtype=float, copy=True)
        if k.ndim != 2 or 0 in k.shape:
            raise OpModelError("INVALID_KERNEL", f"expected a non-empty matrix, got shape {k.shape}")
        if np.any(k < -TOL) or np.any(k > 1.0 + TOL):
            raise OpModelError("INVALID_KERNEL", "entries outside [0,1]")
        defect = float(np.max(np.abs(k.sum(axis=1) - 1.0)))
        if defect > TOL:
            raise OpModelError("INVALID_KERNEL", f"row sums deviate from 1 by {defect:.3e}")
        k.setflags(write=False)
        object.__setattr__(self, "K", k)

    @property
    def shape(self) -> tuple[int, int]:
        return self.K.shape  # type: ignore[return-value]


@dataclass(frozen=True)
class SharpRandomVariable:
    """F: source index -> outcome index (0-based)."""

    mapping: tuple[int, ...]


# ── Subsets ───────────────────────────────────────────────────────────

def subset_mask(indices: Sequence[int]) -> int:
    mask = 0
    for j in indices:
        mask |= 1 << int(j)
    return mask


def mask_indices(mask: int, m: int) -> list[int]:
    if m > MAX_OUTCOMES:
        raise OpModelError("INVALID_SUBSET", f"at most {MAX_OUTCOMES} outcomes, got {m}")
    if mask < 0 or mask >= 1 << m:
        raise OpModelError("INVALID_SUBSET", f"mask {mask} is not a subset of {m} outcomes")
    return [j for j in range(m) if mask >> j & 1]


# ── Operations ────────────────────────────────────────────────────────

def _require_size(n1: int, n2: int) -> None:
    if n1 != n2:
        raise OpModelError("DIMENSION_MISMATCH", f"{n1} vs {n2}")


def classical_pair(p: ClassicalState, a: ClassicalEffect) -> float:
    """Euclidean pairing Σ p_k a_k.

    A kernel effect a_{K(·,X)} pairs as Σ_{j∈X} (pK)_j, term for term the sum of
    kernel_pushforward over X.
    """
    _require_size(p.size, a.size)
    if a.kernel is not None:
        q = p.p @ a.kernel.K
        return float(sum(q[j] for j in mask_indices(a.mask, a.kernel.shape[1])))
    return float(np.dot(p.p, a.a))


def kernel_pushforward(K: MarkovKernel, p: ClassicalState) -> ClassicalState:
    """q_j = Σ_k p_k K_kj."""
    _require_size(p.size, K.shape[0])
    return ClassicalState(p.p @ K.K)


def kernel_effect(K: MarkovKernel, mask: int) -> ClassicalEffect:
    """X ↦ a_{K(·,X)}, a_k = Σ_{j∈X} K_kj."""
    cols = mask_indices(mask, K.shape[1])
    return ClassicalEffect(K.K[:, cols].sum(axis=1), kernel=K, mask=mask)


def kernel_from_function(F: SharpRandomVariable, m: int) -> MarkovKernel:
    """Dirac rows: K_kj = 1 iff F(k) = j."""
    if any(j < 0 or j >= m for j in F.mapping):
        raise OpModelError("RANGE_VIOLATION", f"F maps outside 0..{m - 1}")
    k = np.zeros((len(F.mapping), m))
    k[np.arange(len(F.mapping)), list(F.mapping)] = 1.0
    return MarkovKernel(k)


def compose_kernels(K1: MarkovKernel, K2: MarkovKernel) -> MarkovKernel:
    _require_size(K1.shape[1], K2.shape[0])
    return MarkovKernel(K1.K @ K2.K)


def restrict_kernel(K: MarkovKernel, blocks: Sequence[Sequence[int]]) -> MarkovKernel:
    """Coarse-grain outcomes by merging each block into a single outcome."""
    seen = sorted(j for block in blocks for j in block)
    if seen != list(range(K.shape[1])):
        raise OpModelError("INVALID_SUBSET", "blocks must partition the outcome set")
    return MarkovKernel(np.stack([K.K[:, list(block)].sum(axis=1) for block in blocks], axis=1))


def is_deterministic(K: MarkovKernel, *, tol: float = TOL) -> bool:
    return bool(np.all((np.abs(K.K) <= tol) | (np.abs(K.K - 1.0) <= tol)))


def classical_complement(a: ClassicalEffect) -> ClassicalEffect:
    return ClassicalEffect(1.0 - a.a)


def classical_osum(a: ClassicalEffect, b: ClassicalEffect, *, tol: float = TOL) -> ClassicalEffect | None:
    """a ⊕ b = a + b when every component stays <= 1, else None."""
    _require_size(a.size, b.size)
    total = a.a + b.a
    if np.any(total > 1.0 + tol):
        return None
    return ClassicalEffect(np.minimum(total, 1.0))


def vertex_decomposition(p: ClassicalState) -> dict[int, float]:
    """The unique simplex decomposition: weight p_k on vertex e_k (nonzero weights only)."""
    return {k: float(w) for k, w in enumerate(p.p) if w > 0.0}


def effect_leq(a: ClassicalEffect, b: ClassicalEffect, *, tol: float = TOL) -> bool:
    """Componentwise order."""
    _require_size(a.size, b.size)
    return bool(np.all(a.a <= b.a + tol))


def functional_leq(a: ClassicalEffect, b: ClassicalEffect, *, tol: float = TOL) -> bool:
    """a(p) <= b(p) on every Dirac state δ_k (which spans the simplex)."""
    _require_size(a.size, b.size)
    dirac = np.eye(a.size)
    return all(
        classical_pair(ClassicalState(e), a) <= classical_pair(ClassicalState(e), b) + tol for e in dirac
    )


def hypercube_vertices(n: int) -> Iterator[tuple[int, ClassicalEffect]]:
    """The 2^n crisp effects χ_X in bitmask order."""
    for bits in itertools.product((0.0, 1.0), repeat=n):
        vec = np.array(bits[::-1])
        yield subset_mask([k for k in range(n) if vec[k] == 1.0]), ClassicalEffect(vec)
