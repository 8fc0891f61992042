"""Canonical classical extension over the pure states, on finite meshes.

Measures are atomic: μ = Σ w_i δ_{ω_i} with ω_i pure. The reduction is
R(μ) = Σ w_i ω_i and its dual sends an effect a to the function
f_a(ω) = tr[ω a] on pure states, so ⟨R(μ), a⟩ = Σ w_i f_a(ω_i). Sharp
quantum effects become fuzzy classical effects, and a POVM E becomes the
Markov kernel K(ω, X) = tr[ω E(X)].
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np
import pandas as pd

from opmodel.classical.cmodel import ClassicalState, MarkovKernel
from opmodel.classical.simplex import TOL_LP, box_feasibility
from opmodel.embedding.maps import (
    AffineStateMap,
    ExtensionScheme,
    FiniteModelSpec,
    effect_coords,
    sample_effect_coords,
)
from opmodel.quantum.hilbert import hermitian_basis, identity, ket, projector, random_pure_state, singlet
from opmodel.quantum.operators import (
    TOL,
    DensityOperator,
    EffectOperator,
    Povm,
    as_matrix,
    is_projection,
    pair_raw,
    trace_norm,
)
from opmodel.quantum.qubit_cayley import (
    PAULI,
    SIGMA,
    cayley_matrix,
    projection_from_direction,
    sample_ball,
    sample_sphere,
    sigma_dot,
)
from opmodel.utils import OpModelError, as_rng

logger = logging.getLogger(__name__)

GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))
TSIRELSON = 2.0 * np.sqrt(2.0)
QUOTIENT_TOL = 1e-9


# ── Meshes ────────────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class PureStateMesh:
    """n pure states stored as an (n, d, d) stack of rank-1 projectors."""

    dim: int
    projectors: np.ndarray
    generator: str
    bloch: np.ndarray | None = None

    def __post_init__(self) -> None:
        stack = np.array(self.projectors, dtype=complex, copy=True)
        if stack.ndim != 3 or stack.shape[1:] != (self.dim, self.dim):
            raise OpModelError("DIMENSION_MISMATCH", f"expected (n, {self.dim}, {self.dim}), got {stack.shape}")
        herm = np.max(np.abs(stack - stack.conj().transpose(0, 2, 1)))
        traces = np.einsum("nii->n", stack).real
        eigs = np.linalg.eigvalsh(stack)
        if herm > TOL or np.any(np.abs(traces - 1.0) > TOL) or np.any(eigs[:, 0] < -TOL) or np.any(eigs[:, -1] < 1.0 - TOL):
            raise OpModelError("INVALID_STATE", "mesh points must be pure states")
        stack.setflags(write=False)
        object.__setattr__(self, "projectors", stack)

    def __len__(self) -> int:
        return self.projectors.shape[0]

    def point(self, i: int) -> DensityOperator:
        return DensityOperator(self.projectors[i])

    def values(self, a: Any) -> np.ndarray:
        """tr[ω_i a] for every mesh point."""
        return np.einsum("nij,ji->n", self.projectors, as_matrix(a)).real

    def index_of(self, omega: Any, *, tol: float = QUOTIENT_TOL) -> int | None:
        diff = self.projectors - as_matrix(omega)[None, :, :]
        dist = np.max(np.abs(diff), axis=(1, 2))
        i = int(np.argmin(dist))
        return i if dist[i] <= tol else None


def _projectors_from_bloch(vectors: np.ndarray) -> np.ndarray:
    return 0.5 * (PAULI[0][None, :, :] + np.einsum("nk,kij->nij", vectors.astype(complex), SIGMA))


def bloch_mesh(n: int) -> PureStateMesh:
    """Fibonacci lattice on the Bloch sphere: z_i = 1 - (2i+1)/n, φ_i = i·golden angle."""
    if n < 4:
        raise OpModelError("MESH_TOO_SMALL", f"need n >= 4, got {n}")
    i = np.arange(n)
    z = 1.0 - (2.0 * i + 1.0) / n
    radius = np.sqrt(1.0 - z**2)
    phi = i * GOLDEN_ANGLE
    vectors = np.stack([radius * np.cos(phi), radius * np.sin(phi), z], axis=1)
    vectors.setflags(write=False)
    return PureStateMesh(2, _projectors_from_bloch(vectors), f"fibonacci-sphere({n})", vectors)


def haar_mesh(d: int, n: int, seed: int | np.random.Generator | None = None) -> PureStateMesh:
    if n < 4:
        raise OpModelError("MESH_TOO_SMALL", f"need n >= 4, got {n}")
    rng = as_rng(seed)
    return PureStateMesh(d, np.stack([random_pure_state(d, rng) for _ in range(n)]), f"seeded-haar({n})")


# ── Atomic measures ───────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    """Σ w_i δ_{ω_i} over pure states ω_i (projector stack)."""

    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        atoms = np.array(self.atoms, dtype=complex, copy=True)
        if atoms.ndim == 2:
            atoms = atoms[None, :, :]
        w = np.array(self.weights, dtype=float, copy=True).reshape(-1)
        if atoms.shape[0] != w.size:
            raise OpModelError("DIMENSION_MISMATCH", f"{atoms.shape[0]} atoms vs {w.size} weights")
        if np.any(w < -TOL) or abs(w.sum() - 1.0) > TOL:
            raise OpModelError("INVALID_MEASURE", "weights must be a probability vector")
        for a in atoms:
            if not is_projection(a) or abs(np.trace(a).real - 1.0) > TOL:
                raise OpModelError("INVALID_MEASURE", "atoms must be rank-1 projectors")
        atoms.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", w)

    @classmethod
    def dirac(cls, omega: Any) -> AtomicMeasure:
        return cls(as_matrix(omega)[None, :, :], np.ones(1))

    @property
    def dim(self) -> int:
        return self.atoms.shape[1]


def measure_on_mesh(mesh: PureStateMesh, weights: Sequence[float]) -> AtomicMeasure:
    w = np.asarray(weights, dtype=float)
    if w.size != len(mesh):
        raise OpModelError("DIMENSION_MISMATCH", f"{w.size} weights for {len(mesh)} mesh points")
    return AtomicMeasure(mesh.projectors, w)


def as_classical_state(mu: AtomicMeasure, mesh: PureStateMesh) -> ClassicalState:
    """Weight vector of ``mu`` over the mesh points."""
    p = np.zeros(len(mesh))
    for atom, w in zip(mu.atoms, mu.weights):
        i = mesh.index_of(atom)
        if i is None:
            raise OpModelError("NOT_ON_MESH", "measure has an atom off the mesh")
        p[i] += w
    return ClassicalState(p)


def mix_measures(mu1: AtomicMeasure, mu2: AtomicMeasure, lam: float) -> AtomicMeasure:
    return AtomicMeasure(
        np.concatenate([mu1.atoms, mu2.atoms]),
        np.concatenate([lam * mu1.weights, (1.0 - lam) * mu2.weights]),
    )


def quotient_atoms(mu: AtomicMeasure, tol: float = QUOTIENT_TOL) -> AtomicMeasure:
    """Merge atoms whose projectors agree within ``tol`` in trace norm."""
    kept: list[np.ndarray] = []
    weights: list[float] = []
    for atom, w in zip(mu.atoms, mu.weights):
        for j, k in enumerate(kept):
            if trace_norm(atom - k) < tol:
                weights[j] += w
                break
        else:
            kept.append(atom)
            weights.append(float(w))
    return AtomicMeasure(np.stack(kept), np.array(weights))


def reduce(mu: AtomicMeasure) -> DensityOperator:
    """R(μ) = Σ w_i ω_i."""
    return DensityOperator(np.einsum("i,ijk->jk", mu.weights, mu.atoms))


def expectation(mu: AtomicMeasure, f: Callable[[np.ndarray], float]) -> float:
    """⟨μ, f⟩ = Σ w_i f(ω_i), summed in atom order."""
    total = 0.0
    for atom, w in zip(mu.atoms, mu.weights):
        total += w * f(atom)
    return float(total)


# ── Lifted effects and kernels ────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class LiftedEffect:
    """f_a(ω) = tr[ω a] on pure states."""

    effect: EffectOperator

    def __call__(self, omega: Any) -> float:
        return pair_raw(omega, self.effect).real

    def on_mesh(self, mesh: PureStateMesh) -> np.ndarray:
        return mesh.values(self.effect)


def lift_effect(a: Any) -> LiftedEffect:
    return LiftedEffect(a if isinstance(a, EffectOperator) else EffectOperator(a))


@dataclass(frozen=True, eq=False)
class PureStateKernel:
    """(ω, X) ↦ Σ_{k∈X} tr[ω a_k]."""

    povm: Povm

    def row(self, omega: Any) -> np.ndarray:
        return np.array([pair_raw(omega, e).real for e in self.povm.effects])

    def __call__(self, omega: Any, mask: int) -> float:
        return pair_raw(omega, self.povm.element(mask)).real

    def pushforward(self, mu: AtomicMeasure) -> np.ndarray:
        """Outcome distribution Σ w_i K(ω_i, ·)."""
        out = np.zeros(len(self.povm))
        for atom, w in zip(mu.atoms, mu.weights):
            out += w * self.row(atom)
        return out


def kernel_of_povm(E: Povm, mesh: PureStateMesh) -> MarkovKernel:
    """Mesh points × outcomes kernel with rows (tr[ω a_1], …, tr[ω a_m])."""
    if E.dim != mesh.dim:
        raise OpModelError("DIMENSION_MISMATCH", f"POVM on C^{E.dim}, mesh on C^{mesh.dim}")
    return MarkovKernel(np.stack([mesh.values(e) for e in E.effects], axis=1))


# ── Fuzziness ─────────────────────────────────────────────────────────

@dataclass
class FuzzinessProfile:
    min_value: float
    max_value: float
    counts: np.ndarray
    edges: np.ndarray
    mesh_size: int

    @property
    def deciles_populated(self) -> bool:
        return bool(np.all(self.counts > 0))

    def as_dict(self) -> dict[str, Any]:
        return {
            "min": self.min_value,
            "max": self.max_value,
            "counts": self.counts.tolist(),
            "deciles_populated": self.deciles_populated,
            "mesh_size": self.mesh_size,
        }

    def as_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"bin_lo": self.edges[:-1], "bin_hi": self.edges[1:], "count": self.counts})


def fuzziness_profile(
    P: Any, mesh: PureStateMesh, *, allow_fuzzy: bool = False, bins: int = 10, tol: float = TOL
) -> FuzzinessProfile:
    """Range and histogram of f_P over the mesh.

    Nontrivial projections take every value in [0,1]. O and I are rejected;
    non-projections are rejected unless ``allow_fuzzy`` is set.
    """
    m = as_matrix(P)
    if m.shape != (mesh.dim, mesh.dim):
        raise OpModelError("DIMENSION_MISMATCH", f"effect is {m.shape}, mesh on C^{mesh.dim}")
    d = mesh.dim
    if np.max(np.abs(m)) <= tol or np.max(np.abs(m - identity(d))) <= tol:
        raise OpModelError("TRIVIAL_PROJECTION", "profile of O or I is constant")
    if not allow_fuzzy and not is_projection(m, tol=tol):
        raise OpModelError("NOT_A_PROJECTION", "pass allow_fuzzy=True for general effects")
    values = lift_effect(m).on_mesh(mesh)
    counts, edges = np.histogram(np.clip(values, 0.0, 1.0), bins=bins, range=(0.0, 1.0))
    return FuzzinessProfile(float(values.min()), float(values.max()), counts, edges, len(mesh))


# ── Many-to-one reduction ─────────────────────────────────────────────

@dataclass
class PreimageDemo:
    mu1: AtomicMeasure
    mu2: AtomicMeasure
    rho: DensityOperator
    reduce_gap: float
    measures_differ: bool
    max_pairing_gap: float
    separating_values: tuple[float, float]

    def as_dict(self) -> dict[str, Any]:
        return {
            "reduce_gap": self.reduce_gap,
            "measures_differ": self.measures_differ,
            "max_pairing_gap": self.max_pairing_gap,
            "separating_values": list(self.separating_values),
            "bloch": [float(np.trace(self.rho.matrix @ s).real) for s in SIGMA],
        }


def _support_indicator(mu: AtomicMeasure, *, tol: float = QUOTIENT_TOL) -> Callable[[np.ndarray], float]:
    """χ of the atom set of ``mu``: a classical effect that is not of the form f_a."""

    def indicator(omega: np.ndarray) -> float:
        return 1.0 if any(trace_norm(omega - a) < tol for a in mu.atoms) else 0.0

    return indicator


def preimage_multiplicity_demo(samples: int = 500, seed: int | np.random.Generator | None = None) -> PreimageDemo:
    """Two different measures with the same reduction I/2."""
    rng = as_rng(seed)
    plus = (ket(2, 0) + ket(2, 1)) / np.sqrt(2.0)
    minus = (ket(2, 0) - ket(2, 1)) / np.sqrt(2.0)
    mu1 = AtomicMeasure(np.stack([projector(ket(2, 0)), projector(ket(2, 1))]), [0.5, 0.5])
    mu2 = AtomicMeasure(np.stack([projector(plus), projector(minus)]), [0.5, 0.5])
    rho1, rho2 = reduce(mu1), reduce(mu2)

    gap = 0.0
    for u in sample_effect_coords(FiniteModelSpec.qubit(), rng, samples):
        f = lift_effect(cayley_matrix(u[0], u[1:]))
        gap = max(gap, abs(expectation(mu1, f) - expectation(mu2, f)))

    chi = _support_indicator(mu1)
    distinct = quotient_atoms(mix_measures(mu1, mu2, 0.5)).atoms.shape[0] == 4
    return PreimageDemo(
        mu1=mu1,
        mu2=mu2,
        rho=rho1,
        reduce_gap=trace_norm(rho1.matrix - rho2.matrix),
        measures_differ=distinct,
        max_pairing_gap=gap,
        separating_values=(expectation(mu1, chi), expectation(mu2, chi)),
    )


# ── Bell correlations ─────────────────────────────────────────────────

OUTCOMES = ("++", "+-", "-+", "--")


def product_povm(u: Sequence[float], v: Sequence[float]) -> Povm:
    """½(I ± u·σ) ⊗ ½(I ± v·σ), outcomes ordered ++, +-, -+, --."""
    u_, v_ = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
    effects = []
    for s in (1.0, -1.0):
        for t in (1.0, -1.0):
            effects.append(np.kron(projection_from_direction(s * u_).matrix, projection_from_direction(t * v_).matrix))
    return Povm(tuple(EffectOperator(e) for e in effects), OUTCOMES)


def _correlation(p: np.ndarray) -> float:
    return float(p[0] - p[1] - p[2] + p[3])


def _chsh_value(e: dict[str, float]) -> float:
    return abs(e["ab"] + e["ab'"] + e["a'b"] - e["a'b'"])


def _pairs(a: Any, a2: Any, b: Any, b2: Any) -> dict[str, tuple[Any, Any]]:
    return {"ab": (a, b), "ab'": (a, b2), "a'b": (a2, b), "a'b'": (a2, b2)}


def chsh_quantum(a: Any, a2: Any, b: Any, b2: Any, rho: Any = None) -> tuple[float, dict[str, float]]:
    """S from tr[ρ (u·σ ⊗ v·σ)]; ρ defaults to the singlet."""
    state = singlet() if rho is None else as_matrix(rho)
    corr = {}
    for key, (u, v) in _pairs(a, a2, b, b2).items():
        obs = np.kron(sigma_dot(u), sigma_dot(v))
        corr[key] = pair_raw(state, obs).real
    return _chsh_value(corr), corr


@dataclass
class ChshResult:
    S: float
    correlations: dict[str, float]
    quantum_S: float
    gap: float

    def as_dict(self) -> dict[str, Any]:
        return {"S": self.S, "correlations": dict(self.correlations), "quantum_S": self.quantum_S, "gap": self.gap}

    def as_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"pair": list(self.correlations), "E": list(self.correlations.values())})


def chsh_classical(a: Any, a2: Any, b: Any, b2: Any) -> ChshResult:
    """S from the singlet as a single atom pushed through the product-POVM kernels."""
    mu = AtomicMeasure.dirac(singlet())
    corr = {key: _correlation(PureStateKernel(product_povm(u, v)).pushforward(mu)) for key, (u, v) in _pairs(a, a2, b, b2).items()}
    s_classical = _chsh_value(corr)
    s_quantum, _ = chsh_quantum(a, a2, b, b2)
    return ChshResult(s_classical, corr, s_quantum, abs(s_classical - s_quantum))


@dataclass
class ChshSweep:
    count: int
    sup_S: float
    max_gap: float
    bound: float = TSIRELSON

    @property
    def within_bound(self) -> bool:
        return self.sup_S <= self.bound + 1e-9

    def as_dict(self) -> dict[str, Any]:
        return {"count": self.count, "sup_S": self.sup_S, "max_gap": self.max_gap, "bound": self.bound, "within_bound": self.within_bound}


def _local_data(omega: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Local Bloch vectors and correlation tensor of a two-qubit atom."""
    alpha = np.array([pair_raw(omega, np.kron(s, PAULI[0])).real for s in SIGMA])
    beta = np.array([pair_raw(omega, np.kron(PAULI[0], s)).real for s in SIGMA])
    T = np.array([[pair_raw(omega, np.kron(s, t)).real for t in SIGMA] for s in SIGMA])
    return alpha, beta, T


def chsh_sweep(count: int, seed: int | np.random.Generator | None = None, *, chunk: int = 10_000) -> ChshSweep:
    """Random setting quadruples on the singlet atom.

    The classical side evaluates the kernel row ¼(1 + s u·α + t v·β + st uᵀTv)
    of each product POVM at the atom; the quantum side takes the trace with
    the 4×4 singlet directly.
    """
    rng = as_rng(seed)
    omega = singlet()
    alpha, beta, T = _local_data(omega)
    sup_s, max_gap, done = 0.0, 0.0, 0
    while done < count:
        n = min(chunk, count - done)
        dirs = sample_sphere(rng, 4 * n).reshape(n, 4, 3)
        e_c, e_q = {}, {}
        for key, (i, j) in {"ab": (0, 2), "ab'": (0, 3), "a'b": (1, 2), "a'b'": (1, 3)}.items():
            u, v = dirs[:, i], dirs[:, j]
            ua, vb, uTv = u @ alpha, v @ beta, np.einsum("ni,ij,nj->n", u, T, v)
            p = [0.25 * (1.0 + s * ua + t * vb + s * t * uTv) for s in (1.0, -1.0) for t in (1.0, -1.0)]
            e_c[key] = p[0] - p[1] - p[2] + p[3]
            us = np.einsum("nk,kij->nij", u.astype(complex), SIGMA)
            vs = np.einsum("nk,kij->nij", v.astype(complex), SIGMA)
            obs = np.einsum("nij,nkl->nikjl", us, vs).reshape(n, 4, 4)
            e_q[key] = np.einsum("ij,nji->n", omega, obs).real
        s_c = np.abs(e_c["ab"] + e_c["ab'"] + e_c["a'b"] - e_c["a'b'"])
        s_q = np.abs(e_q["ab"] + e_q["ab'"] + e_q["a'b"] - e_q["a'b'"])
        sup_s = max(sup_s, float(s_c.max()))
        max_gap = max(max_gap, float(np.max(np.abs(s_c - s_q))))
        done += n
    logger.info("chsh sweep: %d quadruples, sup S = %.9f", count, sup_s)
    return ChshSweep(count, sup_s, max_gap)


# ── Reduction map and extension scheme ────────────────────────────────

LIFT_NEIGHBOURS = 24
FULL_LIFT_MAX = 200
INTERIOR_RADIUS = 0.9


def _state_coords(target: FiniteModelSpec, matrices: np.ndarray) -> np.ndarray:
    """Cayley (1, r) on a qubit, Hilbert–Schmidt coordinates otherwise."""
    basis = np.stack(PAULI) if target.kind == "qubit" else np.stack(hermitian_basis(target.size))
    return np.einsum("kij,...ji->...k", basis, matrices).real


def _mesh_coords(mesh: PureStateMesh) -> tuple[FiniteModelSpec, np.ndarray]:
    target = FiniteModelSpec.for_dim(mesh.dim)
    return target, _state_coords(target, mesh.projectors)


def misra_state_map(mesh: PureStateMesh) -> AffineStateMap:
    """R: classical(n) -> quantum, column i = coordinates of mesh point i."""
    target, coords = _mesh_coords(mesh)
    return AffineStateMap(FiniteModelSpec.classical(len(mesh)), target, coords.T, name=f"misra:{mesh.generator}")


def _mesh_lift(coords: np.ndarray, center: np.ndarray, state: np.ndarray, *, tol_lp: float = TOL_LP) -> np.ndarray:
    """A measure on the mesh whose barycentre is ``state``.

    Meshes of up to FULL_LIFT_MAX points go to the LP whole. Larger meshes
    offer only the points nearest to the state, to its reflection through
    the maximally mixed state and to each coordinate axis. A state outside
    the reachable hull falls back to the Dirac measure at its nearest point.
    """
    n = len(coords)
    if n <= FULL_LIFT_MAX:
        candidates = np.arange(n)
    else:
        targets = [(state, LIFT_NEIGHBOURS), (2.0 * center - state, LIFT_NEIGHBOURS)]
        for axis in np.eye(coords.shape[1])[1:]:
            targets += [(center + axis, LIFT_NEIGHBOURS // 4), (center - axis, LIFT_NEIGHBOURS // 4)]
        picked = [np.argpartition(np.linalg.norm(coords - t, axis=1), k)[:k] for t, k in targets]
        candidates = np.unique(np.concatenate(picked))

    measure = np.zeros(n)
    result = box_feasibility(coords[candidates].T, state, tol_lp=tol_lp)
    if result.feasible and result.x is not None:
        measure[candidates] = result.x
        return measure
    logger.debug("mesh lift: %s over %d candidates, using nearest Dirac", result.status, candidates.size)
    measure[int(np.argmin(np.linalg.norm(coords - state, axis=1)))] = 1.0
    return measure


def misra_scheme(
    mesh: PureStateMesh, samples: int = 50, seed: int | np.random.Generator | None = None
) -> ExtensionScheme:
    """Extension over the mesh, lifted by solving R(μ) = ρ for a measure μ.

    States that must lift exactly are mesh points and interior states (a ball
    of radius INTERIOR_RADIUS on a qubit, random mixtures of mesh points
    otherwise). Random pure states off the mesh are only approximated, and
    the report carries their worst defect.
    """
    rng = as_rng(seed)
    R = misra_state_map(mesh)
    target, coords = _mesh_coords(mesh)
    center = _state_coords(target, identity(mesh.dim) / mesh.dim)

    def lift(state: np.ndarray) -> np.ndarray:
        return _mesh_lift(coords, center, state)

    picks = rng.choice(len(mesh), size=min(samples, len(mesh)), replace=False)
    states = [coords[i] for i in np.sort(picks)]
    if target.kind == "qubit":
        states += [np.concatenate([[1.0], r]) for r in INTERIOR_RADIUS * sample_ball(rng, samples)]
        off_mesh = [np.concatenate([[1.0], u]) for u in sample_sphere(rng, samples)]
    else:
        for _ in range(samples):
            idx = rng.choice(len(mesh), size=min(4, len(mesh)), replace=False)
            states.append(rng.dirichlet(np.ones(idx.size)) @ coords[idx])
        off_mesh = [_state_coords(target, random_pure_state(mesh.dim, rng)) for _ in range(samples)]

    effects = [effect_coords(target, identity(mesh.dim)), np.zeros(target.coord_dim)]
    effects += list(sample_effect_coords(target, rng, samples))
    return ExtensionScheme(R, lift, tuple(states), tuple(effects), name=R.name, approximate_states=tuple(off_mesh))
