"""Hilbert-space helpers: kets, Hermitian coordinates, seeded samplers."""

from __future__ import annotations

import functools

import numpy as np

from opmodel.utils import as_rng


def identity(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex)


def ket(d: int, j: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[j] = 1.0
    return v


def projector(vec: np.ndarray) -> np.ndarray:
    """Rank-1 projector |v><v| of the normalized vector."""
    v = np.asarray(vec, dtype=complex)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def singlet() -> np.ndarray:
    """Two-qubit singlet (|01> - |10>)/sqrt(2) as a 4x4 projector."""
    psi = (np.kron(ket(2, 0), ket(2, 1)) - np.kron(ket(2, 1), ket(2, 0))) / np.sqrt(2.0)
    return np.outer(psi, psi.conj())


# ── Hilbert–Schmidt coordinates ───────────────────────────────────────

@functools.lru_cache(maxsize=16)
def hermitian_basis(d: int) -> tuple[np.ndarray, ...]:
    """Orthonormal Hermitian basis: I/sqrt(d), then generalized Gell-Mann / sqrt(2).

    Order is identity, symmetric, antisymmetric, diagonal, so d=2 gives
    (I, σ1, σ2, σ3)/sqrt(2).
    """
    basis: list[np.ndarray] = [identity(d) / np.sqrt(d)]
    sym: list[np.ndarray] = []
    anti: list[np.ndarray] = []
    for j in range(d):
        for k in range(j + 1, d):
            s = np.zeros((d, d), dtype=complex)
            s[j, k] = s[k, j] = 1.0
            sym.append(s / np.sqrt(2.0))
            a = np.zeros((d, d), dtype=complex)
            a[j, k] = -1j
            a[k, j] = 1j
            anti.append(a / np.sqrt(2.0))
    diag: list[np.ndarray] = []
    for l in range(1, d):
        entries = np.zeros(d)
        entries[:l] = 1.0
        entries[l] = -float(l)
        g = np.sqrt(2.0 / (l * (l + 1))) * np.diag(entries).astype(complex)
        diag.append(g / np.sqrt(2.0))
    basis.extend(sym + anti + diag)
    for b in basis:
        b.setflags(write=False)
    return tuple(basis)


def to_coords(x: np.ndarray) -> np.ndarray:
    """Real coordinates c_k = tr[B_k x] of a Hermitian matrix."""
    m = np.asarray(x, dtype=complex)
    d = m.shape[0]
    return np.array([np.einsum("ij,ji->", b, m).real for b in hermitian_basis(d)])


def from_coords(coords: np.ndarray, d: int | None = None) -> np.ndarray:
    c = np.asarray(coords, dtype=float)
    if d is None:
        d = int(round(np.sqrt(c.size)))
    basis = np.stack(hermitian_basis(d))
    return np.einsum("k,kij->ij", c, basis)


# ── Samplers ──────────────────────────────────────────────────────────

def random_unitary(d: int, seed: int | np.random.Generator | None = None) -> np.ndarray:
    """Haar unitary via QR of a Ginibre matrix with phase fix."""
    rng = as_rng(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_pure_vector(d: int, seed: int | np.random.Generator | None = None) -> np.ndarray:
    rng = as_rng(seed)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_pure_state(d: int, seed: int | np.random.Generator | None = None) -> np.ndarray:
    return projector(random_pure_vector(d, seed))


def random_density(d: int, seed: int | np.random.Generator | None = None) -> np.ndarray:
    """Full-rank random state G G† / tr from a Ginibre matrix."""
    rng = as_rng(seed)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_effect(d: int, seed: int | np.random.Generator | None = None) -> np.ndarray:
    """U diag(λ) U† with λ uniform in [0, 1] and U Haar."""
    rng = as_rng(seed)
    u = random_unitary(d, rng)
    lam = rng.uniform(0.0, 1.0, size=d)
    return (u * lam) @ u.conj().T


def random_projection(
    d: int, seed: int | np.random.Generator | None = None, rank: int = 1
) -> np.ndarray:
    rng = as_rng(seed)
    u = random_unitary(d, rng)
    cols = u[:, :rank]
    return cols @ cols.conj().T
