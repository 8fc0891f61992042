"""Wigner phase-space tables for one-dimensional pure states.

W(q, p) = (1/π) ∫ ψ*(q+y) ψ(q-y) e^{2ipy} dy with ħ = 1. The map is affine
and reproduces both marginals, but W takes negative values (first excited
state at the origin), so it is not an embedding into classical probability
densities.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from opmodel.utils import OpModelError

logger = logging.getLogger(__name__)

NORM_TOL = 1e-6
NEGATIVITY_TOL = 1e-6
IMAG_TOL = 1e-8
DEFAULT_EXTENT = 8.0
DEFAULT_POINTS = 256


def uniform_grid(extent: float = DEFAULT_EXTENT, points: int = DEFAULT_POINTS) -> np.ndarray:
    """q_j = -L + j·2L/N for j = 0..N-1 (the origin is a grid point for even N)."""
    if points < 2 or extent <= 0.0:
        raise OpModelError("INVALID_GRID", f"need points >= 2 and extent > 0, got {points}, {extent}")
    return -extent + np.arange(points) * (2.0 * extent / points)


def trapezoid_weights(grid: np.ndarray) -> np.ndarray:
    step = float(grid[1] - grid[0])
    w = np.full(grid.size, step)
    w[0] = w[-1] = 0.5 * step
    return w


# ── Wave functions ────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class WaveFunction:
    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        if grid.ndim != 1 or grid.shape != values.shape:
            raise OpModelError("DIMENSION_MISMATCH", f"grid {grid.shape} vs values {values.shape}")
        norm = float(np.sum(trapezoid_weights(grid) * np.abs(values) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise OpModelError("UNNORMALIZED", f"||psi||^2 = {norm:.9g}")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    @property
    def step(self) -> float:
        return float(self.grid[1] - self.grid[0])

    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def momentum_amplitudes(self, p_grid: np.ndarray) -> np.ndarray:
        """ψ̂(p) = (2π)^{-1/2} ∫ ψ(q) e^{-ipq} dq by direct summation."""
        phases = np.exp(-1j * np.outer(p_grid, self.grid))
        return phases @ (trapezoid_weights(self.grid) * self.values) / np.sqrt(2.0 * np.pi)


def ground_state(grid: np.ndarray) -> WaveFunction:
    """ψ₀(q) = π^{-1/4} e^{-q²/2}."""
    return WaveFunction(grid, np.pi**-0.25 * np.exp(-0.5 * grid**2))


def first_excited_state(grid: np.ndarray) -> WaveFunction:
    """ψ₁(q) = π^{-1/4} √2 q e^{-q²/2}."""
    return WaveFunction(grid, np.pi**-0.25 * np.sqrt(2.0) * grid * np.exp(-0.5 * grid**2))


def coherent_state(grid: np.ndarray, q0: float = 0.0, p0: float = 0.0) -> WaveFunction:
    """Ground state translated to (q0, p0)."""
    values = np.pi**-0.25 * np.exp(-0.5 * (grid - q0) ** 2 + 1j * p0 * grid)
    return WaveFunction(grid, values)


# ── Tables ────────────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class WignerTable:
    """W[i, m] = W(q_i, p_m). Reference marginals are carried when known."""

    q: np.ndarray
    p: np.ndarray
    W: np.ndarray
    position_ref: np.ndarray | None = None
    momentum_ref: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.W.shape != (self.q.size, self.p.size):
            raise OpModelError("DIMENSION_MISMATCH", f"table {self.W.shape} vs grids {self.q.size}x{self.p.size}")
        if np.iscomplexobj(self.W) or not np.all(np.isfinite(self.W)):
            raise OpModelError("INVALID_TABLE", "W must be real and finite")

    def integrate(self, values: np.ndarray) -> float:
        return float(trapezoid_weights(self.q) @ values @ trapezoid_weights(self.p))

    @property
    def normalization(self) -> float:
        return self.integrate(self.W)


def wigner_transform(psi: WaveFunction, p_grid: np.ndarray | None = None) -> WignerTable:
    """Sample W on psi's q-grid times ``p_grid``.

    The y-integral runs over y = kΔ with ψ zero-padded outside the grid, so
    each row is (Δ/π) Σ_k ψ*(q_{i+k}) ψ(q_{i-k}) e^{2ipkΔ}.
    """
    if p_grid is None:
        p_grid = uniform_grid(DEFAULT_EXTENT, DEFAULT_POINTS)
    p_grid = np.asarray(p_grid, dtype=float)
    n, step = psi.grid.size, psi.step

    shifts = np.arange(-(n - 1), n)
    rows = np.arange(n)[:, None]
    plus, minus = rows + shifts[None, :], rows - shifts[None, :]
    inside = (plus >= 0) & (plus < n) & (minus >= 0) & (minus < n)
    padded = np.concatenate([psi.values, [0.0]])
    plus = np.where(inside, plus, n)
    minus = np.where(inside, minus, n)
    correlation = padded[plus].conj() * padded[minus]

    phases = np.exp(2j * np.outer(shifts * step, p_grid))
    table = (step / np.pi) * (correlation @ phases)
    residue = float(np.max(np.abs(table.imag)))
    if residue > IMAG_TOL:
        logger.warning("wigner table has imaginary residue %.3e", residue)

    position_ref = psi.density()
    momentum_ref = np.abs(psi.momentum_amplitudes(p_grid)) ** 2
    return WignerTable(psi.grid.copy(), p_grid, table.real, position_ref, momentum_ref)


@dataclass
class WignerMarginals:
    position: np.ndarray
    momentum: np.ndarray
    position_error: float | None
    momentum_error: float | None


def wigner_marginals(table: WignerTable) -> WignerMarginals:
    """∫W dp and ∫W dq, compared pointwise against the reference densities when present."""
    position = table.W @ trapezoid_weights(table.p)
    momentum = trapezoid_weights(table.q) @ table.W
    pos_err = None if table.position_ref is None else float(np.max(np.abs(position - table.position_ref)))
    mom_err = None if table.momentum_ref is None else float(np.max(np.abs(momentum - table.momentum_ref)))
    return WignerMarginals(position, momentum, pos_err, mom_err)


@dataclass
class NegativityCertificate:
    min_value: float
    q: float
    p: float

    @property
    def negative(self) -> bool:
        """A strictly negative value rules W out as a probability density."""
        return self.min_value < -NEGATIVITY_TOL


def negativity_certificate(table: WignerTable) -> NegativityCertificate:
    i, m = np.unravel_index(int(np.argmin(table.W)), table.W.shape)
    return NegativityCertificate(float(table.W[i, m]), float(table.q[i]), float(table.p[m]))


def mix_tables(w0: WignerTable, w1: WignerTable, weight: float) -> WignerTable:
    """Table of the mixture weight·ρ0 + (1-weight)·ρ1."""
    if not 0.0 <= weight <= 1.0:
        raise OpModelError("RANGE_VIOLATION", f"weight must be in [0,1], got {weight}")
    if not (np.array_equal(w0.q, w1.q) and np.array_equal(w0.p, w1.p)):
        raise OpModelError("DIMENSION_MISMATCH", "tables live on different grids")

    def _mix(a: np.ndarray | None, b: np.ndarray | None) -> np.ndarray | None:
        return None if a is None or b is None else weight * a + (1.0 - weight) * b

    return WignerTable(
        w0.q,
        w0.p,
        weight * w0.W + (1.0 - weight) * w1.W,
        _mix(w0.position_ref, w1.position_ref),
        _mix(w0.momentum_ref, w1.momentum_ref),
    )


def overlap(w0: WignerTable, w1: WignerTable) -> float:
    """2π ∫∫ W0 W1 dq dp, which equals tr[ρ0 ρ1]."""
    if w0.W.shape != w1.W.shape:
        raise OpModelError("DIMENSION_MISMATCH", f"{w0.W.shape} vs {w1.W.shape}")
    return 2.0 * np.pi * w0.integrate(w0.W * w1.W)


def to_frame(table: WignerTable) -> pd.DataFrame:
    """Long format with columns q, p, W."""
    qq, pp = np.meshgrid(table.q, table.p, indexing="ij")
    return pd.DataFrame({"q": qq.ravel(), "p": pp.ravel(), "W": table.W.ravel()})
