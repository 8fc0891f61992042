"""Affine state maps between finite statistical models and their duals.

Every model kind has a real coordinate space and a pairing metric G:

* ``classical(n)``: probability / effect vectors, G = I.
* ``qubit``: Cayley 4-vectors (r0, r) and (a0, a), G = ½I.
* ``qudit(d)``: Hilbert–Schmidt coordinates in ``hermitian_basis(d)``, G = I.

A state map acts on coordinates by a matrix L; its dual is
Φ* = G_S⁻¹ Lᵀ G_T, so ⟨Φρ, a′⟩_T = ⟨ρ, Φ*a′⟩_S. An embedding is good when
Φ* covers the source effect set; an extension is good when its reduction
is onto and R* represents every source effect injectively.

In finite dimension the dual image of the compact effect set is closed, so
"dense in E" is decided as exact membership.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Literal, Sequence

import numpy as np

from opmodel.classical.cmodel import ClassicalEffect, ClassicalState, hypercube_vertices
from opmodel.classical.simplex import MAX_ITERATIONS, TOL_LP, box_feasibility
from opmodel.quantum.hilbert import (
    from_coords,
    hermitian_basis,
    identity,
    random_density,
    random_effect,
    random_projection,
    to_coords,
)
from opmodel.quantum.operators import (
    TOL,
    TOL_PSD,
    DensityOperator,
    EffectOperator,
    Povm,
    ValidationReport,
    as_matrix,
    partial_trace_matrix,
    validate,
)
from opmodel.quantum.qubit_cayley import (
    cayley_decompose,
    cayley_matrix,
    diamond_violations,
    sample_ball,
    sample_diamond,
    sample_sphere,
)
from opmodel.utils import OpModelError, as_rng

logger = logging.getLogger(__name__)

ModelKind = Literal["classical", "qubit", "qudit"]
Verdict = Literal["good", "not-good", "inconclusive"]

DENSITY_NOTE = "finite dimension: the dual image of the compact effect set is closed, so density equals membership"
EFFECT_SAMPLE_SEED = 7


# ── Model descriptors ─────────────────────────────────────────────────

@dataclass(frozen=True)
class FiniteModelSpec:
    """⟨S, E⟩ with S and E given by their coordinate conventions."""

    kind: ModelKind
    size: int
    labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.kind == "classical" and self.size < 1:
            raise OpModelError("INVALID_MODEL", f"classical model needs n >= 1, got {self.size}")
        if self.kind == "qubit" and self.size != 2:
            raise OpModelError("INVALID_MODEL", f"qubit model has d = 2, got {self.size}")
        if self.kind == "qudit" and self.size < 2:
            raise OpModelError("INVALID_MODEL", f"qudit model needs d >= 2, got {self.size}")
        if self.kind not in ("classical", "qubit", "qudit"):
            raise OpModelError("INVALID_MODEL", f"unknown kind {self.kind!r}")
        if self.labels and len(self.labels) != self.size:
            raise OpModelError("INVALID_MODEL", "labels must match size")

    @classmethod
    def classical(cls, n: int, labels: Sequence[str] = ()) -> FiniteModelSpec:
        return cls("classical", n, tuple(labels))

    @classmethod
    def qubit(cls) -> FiniteModelSpec:
        return cls("qubit", 2)

    @classmethod
    def qudit(cls, d: int) -> FiniteModelSpec:
        return cls("qudit", d)

    @classmethod
    def for_dim(cls, d: int) -> FiniteModelSpec:
        return cls.qubit() if d == 2 else cls.qudit(d)

    @property
    def quantum(self) -> bool:
        return self.kind != "classical"

    @property
    def effect_set(self) -> str:
        return "hypercube" if self.kind == "classical" else "operator-interval"

    @property
    def coord_dim(self) -> int:
        if self.kind == "classical":
            return self.size
        return self.size**2

    @property
    def metric(self) -> np.ndarray:
        g = np.eye(self.coord_dim)
        return 0.5 * g if self.kind == "qubit" else g

    def describe(self) -> str:
        return "qubit" if self.kind == "qubit" else f"{self.kind}({self.size})"


# ── Coordinates ───────────────────────────────────────────────────────

def _hermitian_coords(spec: FiniteModelSpec, x: Any) -> np.ndarray:
    m = as_matrix(x)
    if m.shape != (spec.size, spec.size):
        raise OpModelError("DIMENSION_MISMATCH", f"{spec.describe()} expects {spec.size}x{spec.size}, got {m.shape}")
    if spec.kind == "qubit":
        x0, vec = cayley_decompose(m)
        return np.concatenate([[x0], vec])
    return to_coords(m)


def _matrix_from_coords(spec: FiniteModelSpec, coords: np.ndarray) -> np.ndarray:
    if spec.kind == "qubit":
        return cayley_matrix(coords[0], coords[1:])
    return from_coords(coords, spec.size)


def state_coords(spec: FiniteModelSpec, state: Any) -> np.ndarray:
    if spec.kind == "classical":
        p = state.p if isinstance(state, ClassicalState) else np.asarray(state, dtype=float)
        if p.size != spec.size:
            raise OpModelError("DIMENSION_MISMATCH", f"{spec.describe()} vs vector of size {p.size}")
        return np.array(p, dtype=float)
    return _hermitian_coords(spec, state)


def effect_coords(spec: FiniteModelSpec, effect: Any) -> np.ndarray:
    if spec.kind == "classical":
        a = effect.a if isinstance(effect, ClassicalEffect) else np.asarray(effect, dtype=float)
        if a.size != spec.size:
            raise OpModelError("DIMENSION_MISMATCH", f"{spec.describe()} vs vector of size {a.size}")
        return np.array(a, dtype=float)
    return _hermitian_coords(spec, effect)


def state_from_coords(spec: FiniteModelSpec, coords: Sequence[float]) -> ClassicalState | DensityOperator:
    c = np.asarray(coords, dtype=float)
    if spec.kind == "classical":
        return ClassicalState(c)
    return DensityOperator(_matrix_from_coords(spec, c))


def effect_from_coords(spec: FiniteModelSpec, coords: Sequence[float]) -> ClassicalEffect | EffectOperator:
    c = np.asarray(coords, dtype=float)
    if spec.kind == "classical":
        return ClassicalEffect(c)
    return EffectOperator(_matrix_from_coords(spec, c))


def pairing(spec: FiniteModelSpec, s: np.ndarray, e: np.ndarray) -> float:
    return float(np.asarray(s) @ spec.metric @ np.asarray(e))


def effect_check(spec: FiniteModelSpec, coords: np.ndarray, *, tol: float = TOL) -> list[str]:
    """Flags for coordinates that fail to describe a valid effect of ``spec``."""
    c = np.asarray(coords, dtype=float)
    if spec.kind == "classical":
        flags = []
        if np.any(c < -tol):
            flags.append("BELOW_ZERO")
        if np.any(c > 1.0 + tol):
            flags.append("ABOVE_ONE")
        return flags
    if spec.kind == "qubit":
        return diamond_violations(c[0], c[1:], tol=tol)
    return list(validate(from_coords(c, spec.size), "effect", tol=tol, tol_psd=tol).flags)


def state_check(spec: FiniteModelSpec, coords: np.ndarray, *, tol: float = TOL) -> list[str]:
    c = np.asarray(coords, dtype=float)
    if spec.kind == "classical":
        flags = []
        if np.any(c < -tol):
            flags.append("NEGATIVE_PROBABILITY")
        if abs(c.sum() - 1.0) > tol:
            flags.append("NOT_NORMALIZED")
        return flags
    return list(validate(_matrix_from_coords(spec, c), "state", tol=tol, tol_psd=tol).flags)


# ── Sampling ──────────────────────────────────────────────────────────

def sample_state_coords(spec: FiniteModelSpec, rng: np.random.Generator, count: int) -> np.ndarray:
    if spec.kind == "classical":
        return rng.dirichlet(np.ones(spec.size), size=count)
    if spec.kind == "qubit":
        r = sample_ball(rng, count)
        return np.hstack([np.ones((count, 1)), r])
    return np.stack([to_coords(random_density(spec.size, rng)) for _ in range(count)])


def sample_effect_coords(spec: FiniteModelSpec, rng: np.random.Generator, count: int) -> np.ndarray:
    if spec.kind == "classical":
        return rng.uniform(0.0, 1.0, size=(count, spec.size))
    if spec.kind == "qubit":
        return sample_diamond(rng, count)
    return np.stack([to_coords(random_effect(spec.size, rng)) for _ in range(count)])


EffectSampler = Callable[[np.random.Generator, int], list[tuple[str, np.ndarray]]]


def extreme_effect_sampler(spec: FiniteModelSpec) -> EffectSampler:
    """Extreme effects of ``spec``.

    Quantum kinds: I, O, then ``count`` rank-1 projections with random
    direction. Classical kinds: every hypercube vertex (``count`` ignored).
    """

    def sample(rng: np.random.Generator, count: int) -> list[tuple[str, np.ndarray]]:
        if spec.kind == "classical":
            return [(f"vertex:{mask}", e.a.copy()) for mask, e in hypercube_vertices(spec.size)]
        d = spec.size
        out = [
            ("I", effect_coords(spec, identity(d))),
            ("O", effect_coords(spec, np.zeros((d, d), dtype=complex))),
        ]
        if spec.kind == "qubit":
            for j, u in enumerate(sample_sphere(rng, count)):
                out.append((f"projection:{j}", np.concatenate([[1.0], u])))
        else:
            for j in range(count):
                out.append((f"projection:{j}", effect_coords(spec, random_projection(d, rng))))
        return out

    return sample


# ── Maps ──────────────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class AffineStateMap:
    """Φ: S(source) -> S(target) as a coordinate matrix L (target × source)."""

    source: FiniteModelSpec
    target: FiniteModelSpec
    L: np.ndarray
    name: str = ""

    def __post_init__(self) -> None:
        L = np.array(self.L, dtype=float, copy=True)
        expected = (self.target.coord_dim, self.source.coord_dim)
        if L.shape != expected:
            raise OpModelError("DIMENSION_MISMATCH", f"L has shape {L.shape}, expected {expected}")
        if not np.all(np.isfinite(L)):
            raise OpModelError("INVALID_MAP", "non-finite matrix entries")
        L.setflags(write=False)
        object.__setattr__(self, "L", L)

    def apply_coords(self, coords: Sequence[float]) -> np.ndarray:
        return self.L @ np.asarray(coords, dtype=float)

    def apply(self, state: Any) -> ClassicalState | DensityOperator:
        return state_from_coords(self.target, self.apply_coords(state_coords(self.source, state)))


@dataclass(frozen=True, eq=False)
class DualEffectMap:
    """Φ* = G_S⁻¹ Lᵀ G_T, acting on target effect coordinates."""

    phi: AffineStateMap
    matrix: np.ndarray

    def apply_coords(self, coords: Sequence[float]) -> np.ndarray:
        return self.matrix @ np.asarray(coords, dtype=float)

    def apply(self, effect: Any) -> ClassicalEffect | EffectOperator:
        return effect_from_coords(self.phi.source, self.apply_coords(effect_coords(self.phi.target, effect)))


def dual_of(phi: AffineStateMap) -> DualEffectMap:
    g_s_inv = np.linalg.inv(phi.source.metric)
    matrix = g_s_inv @ phi.L.T @ phi.target.metric
    matrix.setflags(write=False)
    return DualEffectMap(phi, matrix)


def is_injective(phi: AffineStateMap, *, tol: float = TOL) -> bool:
    return int(np.linalg.matrix_rank(phi.L, tol=tol)) == phi.source.coord_dim


def identity_map(spec: FiniteModelSpec) -> AffineStateMap:
    return AffineStateMap(spec, spec, np.eye(spec.coord_dim), name=f"identity:{spec.describe()}")


def cayley_embedding() -> AffineStateMap:
    """Hilbert–Schmidt coordinates of C² onto Cayley 4-vectors (ρ̃ = √2 c)."""
    return AffineStateMap(FiniteModelSpec.qudit(2), FiniteModelSpec.qubit(), np.sqrt(2.0) * np.eye(4), name="cayley")


def cayley_reduction() -> AffineStateMap:
    """Inverse of ``cayley_embedding``."""
    return AffineStateMap(
        FiniteModelSpec.qubit(), FiniteModelSpec.qudit(2), np.eye(4) / np.sqrt(2.0), name="inverse-cayley"
    )


def duality_defect(phi: AffineStateMap, samples: int, seed: int | np.random.Generator | None = None) -> float:
    """max |⟨Φρ, a′⟩ − ⟨ρ, Φ*a′⟩| over sampled states and target effects."""
    rng = as_rng(seed)
    dual = dual_of(phi)
    states = sample_state_coords(phi.source, rng, samples)
    effects = sample_effect_coords(phi.target, rng, samples)
    worst = 0.0
    for s, e in zip(states, effects):
        lhs = pairing(phi.target, phi.apply_coords(s), e)
        rhs = pairing(phi.source, s, dual.apply_coords(e))
        worst = max(worst, abs(lhs - rhs))
    return worst


def state_map_violations(
    phi: AffineStateMap, samples: int, seed: int | np.random.Generator | None = None, *, tol: float = TOL
) -> int:
    """Number of sampled source states whose image is not a target state."""
    rng = as_rng(seed)
    states = list(sample_state_coords(phi.source, rng, samples))
    if phi.source.kind == "classical":
        states.extend(np.eye(phi.source.size))
    return sum(1 for s in states if state_check(phi.target, phi.apply_coords(s), tol=tol))


def dual_effect_violations(
    phi: AffineStateMap, samples: int, seed: int | np.random.Generator | None = None, *, tol: float = TOL
) -> int:
    """Number of sampled target effects whose dual image is not a source effect."""
    rng = as_rng(seed)
    dual = dual_of(phi)
    effects = sample_effect_coords(phi.target, rng, samples)
    return sum(1 for e in effects if effect_check(phi.source, dual.apply_coords(e), tol=tol))


# ── Representability ──────────────────────────────────────────────────

@dataclass
class Witness:
    label: str
    effect: np.ndarray
    status: str
    preimage: np.ndarray | None = None
    certificate: np.ndarray | None = None
    reason: str = ""

    def as_dict(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "effect": self.effect,
            "status": self.status,
            "preimage": self.preimage,
            "certificate": self.certificate,
            "reason": self.reason,
        }


def _eigen_certificate(spec: FiniteModelSpec, coords: np.ndarray) -> np.ndarray:
    """A target state on which the candidate preimage leaves [0,1]."""
    m = _matrix_from_coords(spec, coords)
    eigvals, eigvecs = np.linalg.eigh((m + m.conj().T) / 2.0)
    j = 0 if eigvals[0] < 1.0 - eigvals[-1] else -1
    v = eigvecs[:, j]
    return state_coords(spec, np.outer(v, v.conj()))


def effect_representable(
    effect: Sequence[float],
    dual: DualEffectMap,
    *,
    label: str = "",
    tol: float = TOL,
    tol_lp: float = TOL_LP,
    max_iterations: int = MAX_ITERATIONS,
) -> Witness:
    """Is ``effect`` (source coordinates) equal to Φ*a′ for a target effect a′?

    Classical targets are decided exactly by box feasibility. Quantum targets
    are decided by the explicit inverse image when Φ* is invertible, and are
    inconclusive otherwise.
    """
    e = np.asarray(effect, dtype=float)
    target = dual.phi.target
    if target.kind == "classical":
        result = box_feasibility(dual.matrix, e, tol_lp=tol_lp, max_iterations=max_iterations)
        return Witness(label, e, result.status, result.x, result.certificate, result.reason)

    square = dual.matrix.shape[0] == dual.matrix.shape[1]
    if not square or int(np.linalg.matrix_rank(dual.matrix, tol=tol)) < dual.matrix.shape[1]:
        return Witness(label, e, "inconclusive", reason="NON_POLYHEDRAL_TARGET")
    preimage = np.linalg.solve(dual.matrix, e)
    flags = effect_check(target, preimage, tol=tol)
    if not flags:
        return Witness(label, e, "feasible", preimage=preimage)
    return Witness(
        label, e, "infeasible", preimage=preimage, certificate=_eigen_certificate(target, preimage), reason=",".join(flags)
    )


@dataclass
class EmbeddingReport:
    verdict: Verdict
    witnesses: list[Witness]
    tolerances: dict[str, float]
    metrics: dict[str, Any] = field(default_factory=dict)
    flags: list[str] = field(default_factory=list)
    note: str = DENSITY_NOTE

    @property
    def infeasible(self) -> list[Witness]:
        return [w for w in self.witnesses if w.status == "infeasible"]

    def as_dict(self) -> dict[str, Any]:
        return {
            "verdict": self.verdict,
            "witness_count": len(self.witnesses),
            "infeasible_count": len(self.infeasible),
            "witnesses": [w.as_dict() for w in self.witnesses],
            "tolerances": dict(self.tolerances),
            "metrics": dict(self.metrics),
            "flags": list(self.flags),
            "note": self.note,
        }


def _verdict(witnesses: Sequence[Witness]) -> Verdict:
    statuses = {w.status for w in witnesses}
    if "infeasible" in statuses:
        return "not-good"
    if "inconclusive" in statuses:
        return "inconclusive"
    return "good"


def good_embedding_report(
    phi: AffineStateMap,
    sampler: EffectSampler | None = None,
    count: int = 100,
    seed: int | np.random.Generator | None = None,
    *,
    tol: float = TOL,
    tol_lp: float = TOL_LP,
    max_iterations: int = MAX_ITERATIONS,
    checks: int = 100,
) -> EmbeddingReport:
    """Decide whether Φ*(E′) covers the sampled extreme effects of the source model."""
    rng = as_rng(seed)
    sampler = sampler or extreme_effect_sampler(phi.source)
    dual = dual_of(phi)
    witnesses = [
        effect_representable(e, dual, label=label, tol=tol, tol_lp=tol_lp, max_iterations=max_iterations)
        for label, e in sampler(rng, count)
    ]
    flags = [] if is_injective(phi, tol=tol) else ["NOT_INJECTIVE"]
    metrics = {
        "map": phi.name,
        "source": phi.source.describe(),
        "target": phi.target.describe(),
        "injective": not flags,
        "duality_defect": duality_defect(phi, checks, rng),
        "state_image_violations": state_map_violations(phi, checks, rng, tol=tol),
        "dual_effect_violations": dual_effect_violations(phi, checks, rng, tol=tol),
    }
    report = EmbeddingReport(
        verdict=_verdict(witnesses),
        witnesses=witnesses,
        tolerances={"tol": tol, "tol_lp": tol_lp},
        metrics=metrics,
        flags=flags,
    )
    logger.info(
        "embedding %s: %s (%d witnesses, %d infeasible)",
        phi.name or "map", report.verdict, len(witnesses), len(report.infeasible),
    )
    return report


# ── Extensions ────────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class ExtensionScheme:
    """R: extended -> original, with a lift used to check that R is onto.

    ``lift`` maps original-state coordinates to extended-state coordinates;
    ``probe_states`` are original states that must lift exactly and
    ``effect_samples`` original effects, both in coordinates.
    ``approximate_states`` are original states the lift only comes close
    to; their worst defect is reported but never fails R.
    """

    reduction: AffineStateMap
    lift: Callable[[np.ndarray], np.ndarray]
    probe_states: tuple[np.ndarray, ...]
    effect_samples: tuple[np.ndarray, ...]
    name: str = ""
    approximate_states: tuple[np.ndarray, ...] = ()


def _null_vector(matrix: np.ndarray) -> np.ndarray:
    _, _, vh = np.linalg.svd(matrix)
    return vh[-1]


def good_extension_report(scheme: ExtensionScheme, *, tol: float = TOL) -> EmbeddingReport:
    """Decide whether R is onto the probes and R* injectively lands in the extended effects."""
    R = scheme.reduction
    extended, original = R.source, R.target
    witnesses: list[Witness] = []
    flags: list[str] = []

    surjectivity_defect = 0.0
    for j, rho in enumerate(scheme.probe_states):
        lifted = scheme.lift(np.asarray(rho, dtype=float))
        back = R.apply_coords(lifted)
        defect = float(np.max(np.abs(back - rho)))
        surjectivity_defect = max(surjectivity_defect, defect)
        state_flags = state_check(extended, lifted, tol=tol)
        if state_flags or defect > tol:
            witnesses.append(
                Witness(f"probe:{j}", np.asarray(rho), "infeasible", preimage=lifted, reason=",".join(state_flags) or "R(lift) != probe")
            )
    if any(w.label.startswith("probe:") for w in witnesses):
        flags.append("NOT_SURJECTIVE")

    approximation_defect = 0.0
    for rho in scheme.approximate_states:
        rho = np.asarray(rho, dtype=float)
        back = R.apply_coords(scheme.lift(rho))
        approximation_defect = max(approximation_defect, float(np.max(np.abs(back - rho))))

    dual = dual_of(R)
    rank = int(np.linalg.matrix_rank(dual.matrix, tol=tol))
    if rank < original.coord_dim:
        flags.append("RANK_DEFICIENT")
        kernel = _null_vector(dual.matrix)
        witnesses.append(Witness("kernel", kernel, "infeasible", certificate=kernel, reason=f"rank {rank} < {original.coord_dim}"))

    for j, a in enumerate(scheme.effect_samples):
        image = dual.apply_coords(a)
        effect_flags = effect_check(extended, image, tol=tol)
        status = "infeasible" if effect_flags else "feasible"
        witnesses.append(Witness(f"effect:{j}", np.asarray(a), status, preimage=image, reason=",".join(effect_flags)))

    report = EmbeddingReport(
        verdict=_verdict(witnesses),
        witnesses=witnesses,
        tolerances={"tol": tol},
        metrics={
            "scheme": scheme.name,
            "extended": extended.describe(),
            "original": original.describe(),
            "dual_rank": rank,
            "probes": len(scheme.probe_states),
            "surjectivity_defect": surjectivity_defect,
            "approximate_states": len(scheme.approximate_states),
            "approximation_defect": approximation_defect,
            "duality_defect": duality_defect(R, 100, EFFECT_SAMPLE_SEED),
        },
        flags=flags,
    )
    logger.info("extension %s: %s", scheme.name or "scheme", report.verdict)
    return report


def compound_extension(d_sys: int, d_anc: int) -> tuple[AffineStateMap, DualEffectMap]:
    """Partial trace over the ancilla and its dual a ↦ a ⊗ I."""
    if d_sys < 2 or d_anc < 2:
        raise OpModelError("DIMENSION_MISMATCH", f"need d_sys, d_anc >= 2, got {d_sys}, {d_anc}")
    big = FiniteModelSpec.qudit(d_sys * d_anc)
    small = FiniteModelSpec.qudit(d_sys)
    columns = [to_coords(partial_trace_matrix(b, (d_sys, d_anc), "first")) for b in hermitian_basis(d_sys * d_anc)]
    R = AffineStateMap(big, small, np.stack(columns, axis=1), name=f"partial-trace:{d_sys}x{d_anc}")
    return R, dual_of(R)


def compound_scheme(
    d_sys: int = 2, d_anc: int = 2, samples: int = 50, seed: int | np.random.Generator | None = None
) -> ExtensionScheme:
    rng = as_rng(seed)
    R, _ = compound_extension(d_sys, d_anc)
    ancilla = identity(d_anc) / d_anc

    def lift(coords: np.ndarray) -> np.ndarray:
        return to_coords(np.kron(from_coords(coords, d_sys), ancilla))

    probes = [to_coords(random_density(d_sys, rng)) for _ in range(samples)]
    probes += [to_coords(random_projection(d_sys, rng)) for _ in range(samples)]
    effects = [to_coords(identity(d_sys)), np.zeros(d_sys**2)]
    effects += [to_coords(random_effect(d_sys, rng)) for _ in range(samples)]
    return ExtensionScheme(R, lift, tuple(probes), tuple(effects), name=R.name)


def inverse_cayley_scheme(samples: int = 50, seed: int | np.random.Generator | None = None) -> ExtensionScheme:
    """Cayley 4-vectors as the extended model, reduced back by Φ⁻¹."""
    rng = as_rng(seed)
    embed = cayley_embedding()
    probes = [np.concatenate([[1.0], u]) / np.sqrt(2.0) for u in sample_sphere(rng, samples)]
    effects = [to_coords(random_effect(2, rng)) for _ in range(samples)]
    return ExtensionScheme(cayley_reduction(), embed.apply_coords, tuple(probes), tuple(effects), name="inverse-cayley")


# ── POVM embeddings and tomography ────────────────────────────────────

TETRAHEDRON = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float) / np.sqrt(3.0)


def sic_qubit_povm() -> Povm:
    """¼(I + n_k·σ) for the four tetrahedron directions n_k."""
    return Povm(tuple(EffectOperator(cayley_matrix(0.5, 0.5 * n)) for n in TETRAHEDRON))


def povm_embedding(E: Povm) -> AffineStateMap:
    """ρ ↦ (tr[ρ a_1], …, tr[ρ a_m]) into classical(m)."""
    source = FiniteModelSpec.for_dim(E.dim)
    rows = np.stack([effect_coords(source, e) for e in E.effects]) @ source.metric
    return AffineStateMap(source, FiniteModelSpec.classical(len(E)), rows, name=f"povm:{len(E)}")


def reduced_model_report(
    E: Povm, *, tol: float = TOL, tol_lp: float = TOL_LP, max_iterations: int = MAX_ITERATIONS
) -> EmbeddingReport:
    """Good-embedding check for ⟨S, E(A)⟩, whose effects are the ranges E(X)."""
    phi = povm_embedding(E)

    def sampler(rng: np.random.Generator, count: int) -> list[tuple[str, np.ndarray]]:
        return [(f"E({mask})", effect_coords(phi.source, E.element(mask))) for mask in range(1 << len(E))]

    return good_embedding_report(phi, sampler, 0, EFFECT_SAMPLE_SEED, tol=tol, tol_lp=tol_lp, max_iterations=max_iterations)


@dataclass
class ImageStats:
    count: int
    min_coord: float
    max_coord: float
    in_simplex: bool
    strictly_inside: bool
    touches_vertex: bool

    def as_dict(self) -> dict[str, Any]:
        return dict(self.__dict__)


def image_in_simplex(phi: AffineStateMap, points: np.ndarray, *, tol: float = TOL) -> ImageStats:
    """Where the images of ``points`` (source state coordinates) sit in the target simplex."""
    if phi.target.kind != "classical":
        raise OpModelError("INVALID_MAP", "image_in_simplex needs a classical target")
    images = np.atleast_2d(np.asarray(points, dtype=float)) @ phi.L.T
    sums = images.sum(axis=1)
    lo, hi = float(images.min()), float(images.max())
    return ImageStats(
        count=images.shape[0],
        min_coord=lo,
        max_coord=hi,
        in_simplex=bool(lo >= -tol and np.all(np.abs(sums - 1.0) <= tol)),
        strictly_inside=bool(lo > tol),
        touches_vertex=bool(hi >= 1.0 - tol),
    )


@dataclass
class Reconstruction:
    matrix: np.ndarray
    residual: float
    exact: bool
    rank: int
    report: ValidationReport

    @property
    def state(self) -> DensityOperator:
        if not self.report.valid:
            raise OpModelError("INVALID_STATE", ",".join(self.report.flags))
        return DensityOperator(self.matrix)


def reconstruct_state(
    E: Povm, probs: Sequence[float], *, tol: float = TOL, tol_psd: float = TOL_PSD
) -> Reconstruction:
    """Linear inversion of the outcome statistics of an informationally complete POVM."""
    p = np.asarray(probs, dtype=float).reshape(-1)
    if p.size != len(E):
        raise OpModelError("DIMENSION_MISMATCH", f"{p.size} probabilities for {len(E)} outcomes")
    if np.any(p < -tol) or abs(p.sum() - 1.0) > tol:
        raise OpModelError("RANGE_VIOLATION", "probabilities must lie in the simplex")
    d = E.dim
    C = E.coordinate_matrix()
    rank = int(np.linalg.matrix_rank(C, tol=tol))
    if rank < d * d:
        raise OpModelError("NOT_INFORMATIONALLY_COMPLETE", f"rank {rank} < {d * d}")
    coords = np.linalg.pinv(C) @ p
    residual = float(np.max(np.abs(C @ coords - p)))
    exact = residual <= tol
    if not exact:
        logger.warning("tomography: probabilities inconsistent with the POVM, least-squares residual %.3e", residual)
    matrix = from_coords(coords, d)
    return Reconstruction(matrix, residual, exact, rank, validate(matrix, "state", tol=tol, tol_psd=tol_psd))
