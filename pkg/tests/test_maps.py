from __future__ import annotations

import numpy as np
import pytest

from opmodel.embedding.maps import (
    AffineStateMap,
    ExtensionScheme,
    FiniteModelSpec,
    cayley_embedding,
    compound_extension,
    compound_scheme,
    dual_effect_violations,
    dual_of,
    duality_defect,
    effect_coords,
    effect_representable,
    extreme_effect_sampler,
    good_embedding_report,
    good_extension_report,
    identity_map,
    image_in_simplex,
    inverse_cayley_scheme,
    is_injective,
    povm_embedding,
    reconstruct_state,
    reduced_model_report,
    sic_qubit_povm,
    state_coords,
    state_map_violations,
)
from opmodel.quantum.hilbert import identity, ket, projector, random_density
from opmodel.quantum.operators import EffectOperator, Povm, povm_probabilities, trace_norm
from opmodel.quantum.qubit_cayley import cayley_matrix, sample_sphere
from opmodel.utils import OpModelError


# ── Model descriptors ─────────────────────────────────────────────────

def test_model_spec_shapes() -> None:
    assert FiniteModelSpec.classical(4).describe() == "classical(4)"
    assert FiniteModelSpec.qubit().describe() == "qubit"
    assert FiniteModelSpec.qudit(3).coord_dim == 9
    assert np.allclose(FiniteModelSpec.qubit().metric, 0.5 * np.eye(4))
    assert FiniteModelSpec.for_dim(2) == FiniteModelSpec.qubit()
    assert FiniteModelSpec.classical(3).effect_set == "hypercube"
    with pytest.raises(OpModelError) as exc:
        FiniteModelSpec.qudit(1)
    assert exc.value.code == "INVALID_MODEL"


def test_qubit_coordinates_are_cayley_vectors() -> None:
    spec = FiniteModelSpec.qubit()
    assert state_coords(spec, projector(ket(2, 0))) == pytest.approx([1.0, 0.0, 0.0, 1.0])
    assert effect_coords(spec, identity(2)) == pytest.approx([2.0, 0.0, 0.0, 0.0])


def test_map_shape_is_checked() -> None:
    with pytest.raises(OpModelError) as exc:
        AffineStateMap(FiniteModelSpec.classical(2), FiniteModelSpec.classical(3), np.eye(2))
    assert exc.value.code == "DIMENSION_MISMATCH"


# ── Pairing preservation ──────────────────────────────────────────────

@pytest.mark.parametrize(
    "phi",
    [
        cayley_embedding(),
        povm_embedding(sic_qubit_povm()),
        compound_extension(2, 2)[0],
        identity_map(FiniteModelSpec.classical(5)),
    ],
    ids=["cayley", "sic", "partial-trace", "identity"],
)
def test_dual_preserves_pairing(phi: AffineStateMap) -> None:
    assert duality_defect(phi, 500, 20030321) <= 1e-10


def test_cayley_embedding_maps_states_and_effects_faithfully() -> None:
    phi = cayley_embedding()
    assert is_injective(phi)
    assert state_map_violations(phi, 200, 1) == 0
    assert dual_effect_violations(phi, 200, 2) == 0
    rho = random_density(2, 3)
    image = phi.apply(rho)
    assert np.allclose(image.matrix, rho)


def test_partial_trace_dual_is_tensor_with_identity() -> None:
    R, dual = compound_extension(2, 3)
    a = EffectOperator(projector(ket(2, 1)))
    lifted = dual.apply(a)
    assert np.allclose(lifted.matrix, np.kron(a.matrix, identity(3)))
    with pytest.raises(OpModelError):
        compound_extension(1, 2)


# ── Good embeddings ───────────────────────────────────────────────────

def test_cayley_embedding_is_good() -> None:
    report = good_embedding_report(cayley_embedding(), count=50, seed=1)
    assert report.verdict == "good"
    assert report.infeasible == []
    assert report.metrics["injective"] is True
    assert report.metrics["duality_defect"] <= 1e-10


def test_identity_on_classical_model_is_good() -> None:
    report = good_embedding_report(identity_map(FiniteModelSpec.classical(4)), seed=2)
    assert report.verdict == "good"
    assert len(report.witnesses) == 16


def test_sic_embedding_rejects_every_projection() -> None:
    report = good_embedding_report(povm_embedding(sic_qubit_povm()), count=100, seed=3)
    assert report.verdict == "not-good"
    by_label = {w.label: w for w in report.witnesses}
    assert by_label["I"].status == "feasible"
    assert by_label["O"].status == "feasible"
    projections = [w for w in report.witnesses if w.label.startswith("projection:")]
    assert len(projections) == 100
    dual = dual_of(povm_embedding(sic_qubit_povm()))
    vertices = np.array([[(m >> k) & 1 for k in range(4)] for m in range(16)], dtype=float)
    for w in projections:
        assert w.status == "infeasible"
        assert w.certificate is not None
        # y·(A x) < y·b on every box vertex
        assert np.max(vertices @ (dual.matrix.T @ w.certificate)) < w.certificate @ w.effect


def test_reduced_sic_model_is_good() -> None:
    report = reduced_model_report(sic_qubit_povm())
    assert report.verdict == "good"
    assert len(report.witnesses) == 16


def test_non_polyhedral_quantum_target_is_inconclusive() -> None:
    R, _ = compound_extension(2, 2)
    report = good_embedding_report(R, count=3, seed=4)
    assert report.verdict == "inconclusive"
    assert "NOT_INJECTIVE" in report.flags
    assert {w.reason for w in report.witnesses} == {"NON_POLYHEDRAL_TARGET"}


def test_effect_outside_dual_image_of_quantum_target_is_infeasible() -> None:
    # half the Cayley map: the only preimage of I is 2I
    phi = AffineStateMap(FiniteModelSpec.qudit(2), FiniteModelSpec.qubit(), np.sqrt(2.0) / 2.0 * np.eye(4))
    w = effect_representable(effect_coords(FiniteModelSpec.qudit(2), identity(2)), dual_of(phi), label="I")
    assert w.status == "infeasible"
    assert w.certificate is not None


def test_extreme_sampler_labels() -> None:
    sample = extreme_effect_sampler(FiniteModelSpec.qubit())(np.random.default_rng(0), 3)
    assert [label for label, _ in sample] == ["I", "O", "projection:0", "projection:1", "projection:2"]
    vertices = extreme_effect_sampler(FiniteModelSpec.classical(2))(np.random.default_rng(0), 99)
    assert [label for label, _ in vertices] == ["vertex:0", "vertex:1", "vertex:2", "vertex:3"]


# ── Extensions ────────────────────────────────────────────────────────

@pytest.mark.parametrize(
    "scheme",
    [compound_scheme(2, 2, 20, 5), inverse_cayley_scheme(20, 6)],
    ids=["compound", "inverse-cayley"],
)
def test_reference_extensions_are_good(scheme: ExtensionScheme) -> None:
    report = good_extension_report(scheme)
    assert report.verdict == "good", report.flags
    assert report.metrics["surjectivity_defect"] <= 1e-9
    assert report.metrics["duality_defect"] <= 1e-10


def test_rank_deficient_reduction_is_not_good() -> None:
    # two-point classical model onto the z-axis of the Bloch ball
    L = np.array([[1.0, 1.0], [0.0, 0.0], [0.0, 0.0], [1.0, -1.0]])
    R = AffineStateMap(FiniteModelSpec.classical(2), FiniteModelSpec.qubit(), L)
    scheme = ExtensionScheme(
        R,
        lambda state: np.array([0.5, 0.5]),
        probe_states=(np.array([1.0, 1.0, 0.0, 0.0]),),
        effect_samples=(np.array([2.0, 0.0, 0.0, 0.0]),),
    )
    report = good_extension_report(scheme)
    assert report.verdict == "not-good"
    assert "NOT_SURJECTIVE" in report.flags
    assert "RANK_DEFICIENT" in report.flags
    kernel = next(w for w in report.witnesses if w.label == "kernel")
    assert np.allclose(dual_of(R).matrix @ kernel.certificate, 0.0, atol=1e-10)


# ── POVM embeddings and tomography ────────────────────────────────────

def test_sic_images_stay_off_the_vertices() -> None:
    phi = povm_embedding(sic_qubit_povm())
    pure = np.hstack([np.ones((200, 1)), sample_sphere(7, 200)])
    stats = image_in_simplex(phi, pure)
    assert stats.in_simplex
    assert not stats.touches_vertex
    assert stats.max_coord <= 0.5 + 1e-12



def test_sic_images_of_random_pure_states_are_strictly_inside() -> None:
    phi = povm_embedding(sic_qubit_povm())
    pure = np.hstack([np.ones((1000, 1)), sample_sphere(8, 1000)])
    stats = image_in_simplex(phi, pure)
    assert stats.strictly_inside
    assert not stats.touches_vertex


def test_only_the_sic_povm_embedding_is_injective() -> None:
    assert is_injective(povm_embedding(sic_qubit_povm()))
    two = Povm((EffectOperator(projector(ket(2, 0))), EffectOperator(projector(ket(2, 1)))))
    trine_dirs = [np.array([np.sin(t), 0.0, np.cos(t)]) for t in (0.0, 2.0 * np.pi / 3.0, 4.0 * np.pi / 3.0)]
    trine = Povm(tuple(EffectOperator(cayley_matrix(2.0 / 3.0, 2.0 / 3.0 * u)) for u in trine_dirs))
    assert not is_injective(povm_embedding(two))
    assert not is_injective(povm_embedding(trine))


def test_tomography_round_trip() -> None:
    E = sic_qubit_povm()
    rng = np.random.default_rng(20030321)
    for _ in range(100):
        rho = random_density(2, rng)
        rec = reconstruct_state(E, povm_probabilities(rho, E))
        assert rec.exact
        assert trace_norm(rec.state.matrix - rho) <= 1e-9


def test_tomography_needs_informational_completeness() -> None:
    E = Povm((EffectOperator(projector(ket(2, 0))), EffectOperator(projector(ket(2, 1)))))
    with pytest.raises(OpModelError) as exc:
        reconstruct_state(E, [0.5, 0.5])
    assert exc.value.code == "NOT_INFORMATIONALLY_COMPLETE"
    with pytest.raises(OpModelError) as exc:
        reconstruct_state(sic_qubit_povm(), [0.5, 0.5, 0.5, -0.5])
    assert exc.value.code == "RANGE_VIOLATION"
