from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from opmodel.embedding.canonical import (
    TSIRELSON,
    AtomicMeasure,
    as_classical_state,
    bloch_mesh,
    chsh_classical,
    chsh_quantum,
    chsh_sweep,
    expectation,
    fuzziness_profile,
    haar_mesh,
    kernel_of_povm,
    lift_effect,
    measure_on_mesh,
    misra_scheme,
    misra_state_map,
    mix_measures,
    preimage_multiplicity_demo,
    product_povm,
    quotient_atoms,
    reduce,
)
from opmodel.embedding.maps import duality_defect, good_extension_report, sic_qubit_povm
from opmodel.quantum.hilbert import identity, ket, projector, random_effect, random_pure_state
from opmodel.quantum.operators import pair_raw, povm_probabilities
from opmodel.utils import OpModelError

SEEDS = st.integers(min_value=0, max_value=2**32 - 1)


# ── Meshes and measures ───────────────────────────────────────────────

def test_bloch_mesh_minimum_size() -> None:
    assert len(bloch_mesh(4)) == 4
    with pytest.raises(OpModelError) as exc:
        bloch_mesh(3)
    assert exc.value.code == "MESH_TOO_SMALL"


def test_haar_mesh_points_are_pure() -> None:
    mesh = haar_mesh(3, 50, 1)
    assert len(mesh) == 50
    assert mesh.point(7).purity == pytest.approx(1.0)


def test_atomic_measure_validation() -> None:
    with pytest.raises(OpModelError) as exc:
        AtomicMeasure(np.stack([projector(ket(2, 0))]), [0.5])
    assert exc.value.code == "INVALID_MEASURE"
    with pytest.raises(OpModelError) as exc:
        AtomicMeasure(np.stack([identity(2) / 2]), [1.0])
    assert exc.value.code == "INVALID_MEASURE"


@settings(max_examples=30, deadline=None)
@given(seed=SEEDS)
def test_lifted_effects_reproduce_quantum_probabilities(seed: int) -> None:
    rng = np.random.default_rng(seed)
    mesh = bloch_mesh(200)
    mu = measure_on_mesh(mesh, rng.dirichlet(np.ones(len(mesh))))
    a = random_effect(2, rng)
    assert expectation(mu, lift_effect(a)) == pytest.approx(pair_raw(reduce(mu), a).real, abs=1e-12)


def test_measure_on_mesh_round_trips_to_classical_state() -> None:
    mesh = bloch_mesh(10)
    mu = AtomicMeasure.dirac(mesh.projectors[3])
    p = as_classical_state(mu, mesh)
    assert p.p.tolist() == [0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
    with pytest.raises(OpModelError) as exc:
        as_classical_state(AtomicMeasure.dirac(random_pure_state(2, 9)), mesh)
    assert exc.value.code == "NOT_ON_MESH"


def test_quotient_merges_equal_atoms() -> None:
    mu = AtomicMeasure(np.stack([projector(ket(2, 0))] * 3), [0.2, 0.3, 0.5])
    merged = quotient_atoms(mu)
    assert merged.atoms.shape[0] == 1
    assert merged.weights == pytest.approx([1.0])


def test_kernel_of_povm_matches_trace_probabilities() -> None:
    mesh = bloch_mesh(100)
    E = sic_qubit_povm()
    K = kernel_of_povm(E, mesh)
    assert K.shape == (100, 4)
    weights = np.zeros(100)
    weights[[3, 40, 77]] = [0.2, 0.3, 0.5]
    mu = measure_on_mesh(mesh, weights)
    assert weights @ K.K == pytest.approx(povm_probabilities(reduce(mu), E), abs=1e-12)


# ── Fuzziness ─────────────────────────────────────────────────────────

def test_z_projection_profile_covers_unit_interval() -> None:
    profile = fuzziness_profile(projector(ket(2, 0)), bloch_mesh(10_000))
    assert profile.min_value < 1e-3
    assert profile.max_value > 1.0 - 1e-3
    assert profile.deciles_populated
    assert int(profile.counts.sum()) == 10_000
    assert list(profile.as_frame().columns) == ["bin_lo", "bin_hi", "count"]


def test_profile_rejects_trivial_and_fuzzy_effects() -> None:
    mesh = bloch_mesh(100)
    with pytest.raises(OpModelError) as exc:
        fuzziness_profile(identity(2), mesh)
    assert exc.value.code == "TRIVIAL_PROJECTION"
    with pytest.raises(OpModelError) as exc:
        fuzziness_profile(np.diag([0.8, 0.2]), mesh)
    assert exc.value.code == "NOT_A_PROJECTION"
    fuzzy = fuzziness_profile(np.diag([0.8, 0.2]), mesh, allow_fuzzy=True)
    assert fuzzy.min_value >= 0.2 - 1e-12
    assert fuzzy.max_value <= 0.8 + 1e-12


def test_profile_rejects_effect_of_the_wrong_dimension() -> None:
    with pytest.raises(OpModelError) as exc:
        fuzziness_profile(projector(ket(3, 0)), bloch_mesh(100))
    assert exc.value.code == "DIMENSION_MISMATCH"
    with pytest.raises(OpModelError) as exc:
        fuzziness_profile(projector(ket(2, 0)), haar_mesh(3, 20, 1))
    assert exc.value.code == "DIMENSION_MISMATCH"


def test_two_decompositions_of_the_maximally_mixed_state() -> None:
    demo = preimage_multiplicity_demo(500, 11)
    assert demo.reduce_gap <= 1e-12
    assert demo.measures_differ
    assert demo.max_pairing_gap <= 1e-12
    assert demo.separating_values == (1.0, 0.0)
    assert np.allclose(demo.rho.matrix, identity(2) / 2)


def test_mixing_measures_keeps_all_atoms() -> None:
    mu1 = AtomicMeasure.dirac(projector(ket(2, 0)))
    mu2 = AtomicMeasure.dirac(projector(ket(2, 1)))
    mixed = mix_measures(mu1, mu2, 0.25)
    assert mixed.weights == pytest.approx([0.25, 0.75])
    assert np.allclose(reduce(mixed).matrix, np.diag([0.25, 0.75]))


@settings(max_examples=40, deadline=None)
@given(seed=SEEDS)
def test_reduce_is_affine_under_mixing(seed: int) -> None:
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 4))
    mu1 = AtomicMeasure(np.stack([random_pure_state(d, rng) for _ in range(3)]), rng.dirichlet(np.ones(3)))
    mu2 = AtomicMeasure(np.stack([random_pure_state(d, rng) for _ in range(5)]), rng.dirichlet(np.ones(5)))
    lam = float(rng.uniform(0.0, 1.0))
    mixed = reduce(mix_measures(mu1, mu2, lam)).matrix
    expected = lam * reduce(mu1).matrix + (1.0 - lam) * reduce(mu2).matrix
    assert np.max(np.abs(mixed - expected)) <= 1e-12


# ── Bell correlations ─────────────────────────────────────────────────

TSIRELSON_DIRS = (
    np.array([0.0, 0.0, 1.0]),
    np.array([1.0, 0.0, 0.0]),
    np.array([1.0, 0.0, 1.0]) / np.sqrt(2.0),
    np.array([-1.0, 0.0, 1.0]) / np.sqrt(2.0),
)


def test_tsirelson_settings_reach_the_bound() -> None:
    result = chsh_classical(*TSIRELSON_DIRS)
    assert result.S == pytest.approx(TSIRELSON, abs=1e-7)
    assert result.gap <= 1e-12
    assert set(result.correlations) == {"ab", "ab'", "a'b", "a'b'"}


def test_antipodal_settings_give_two() -> None:
    u = np.array([0.0, 0.0, 1.0])
    result = chsh_classical(u, -u, u, -u)
    assert result.S == pytest.approx(2.0, abs=1e-12)


def test_product_povm_is_normalized() -> None:
    E = product_povm([0.0, 0.0, 1.0], [1.0, 0.0, 0.0])
    assert len(E) == 4
    assert np.allclose(E.element(0b1111), identity(4))


@settings(max_examples=30, deadline=None)
@given(seed=SEEDS)
def test_kernel_and_trace_correlations_agree(seed: int) -> None:
    rng = np.random.default_rng(seed)
    dirs = rng.standard_normal((4, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    result = chsh_classical(*dirs)
    s_q, _ = chsh_quantum(*dirs)
    assert result.S == pytest.approx(s_q, abs=1e-12)
    assert result.S <= TSIRELSON + 1e-9


def test_random_settings_never_exceed_tsirelson() -> None:
    sweep = chsh_sweep(100_000, 20030321)
    assert sweep.within_bound
    assert sweep.sup_S <= TSIRELSON + 1e-9
    assert sweep.sup_S > 2.0
    assert sweep.max_gap <= 1e-12


# ── Reduction map ─────────────────────────────────────────────────────

def test_mesh_reduction_preserves_pairing() -> None:
    assert duality_defect(misra_state_map(bloch_mesh(300)), 500, 3) <= 1e-10


def test_mesh_extension_is_good() -> None:
    report = good_extension_report(misra_scheme(bloch_mesh(500), 30, 4))
    assert report.verdict == "good", report.flags
    assert report.metrics["dual_rank"] == 4
    assert report.metrics["probes"] == 60
    assert report.metrics["surjectivity_defect"] <= 1e-9
    assert report.metrics["approximate_states"] == 30
    assert 0.0 < report.metrics["approximation_defect"] < 0.2
    assert "NOT_SURJECTIVE" not in report.flags


@pytest.mark.parametrize(
    "state",
    [[1.0, 0.3, -0.2, 0.4], [1.0, 0.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.85], [1.0, -0.5, 0.5, -0.5]],
)
def test_mesh_lift_hits_interior_states(state: list[float]) -> None:
    scheme = misra_scheme(bloch_mesh(500), 5, 0)
    target = np.array(state)
    mu = scheme.lift(target)
    assert np.all(mu >= 0.0)
    assert mu.sum() == pytest.approx(1.0, abs=1e-9)
    assert np.max(np.abs(scheme.reduction.apply_coords(mu) - target)) <= 1e-9


def test_coarse_mesh_is_not_onto_the_ball() -> None:
    report = good_extension_report(misra_scheme(bloch_mesh(4), 20, 1))
    assert report.verdict == "not-good"
    assert "NOT_SURJECTIVE" in report.flags
    assert report.metrics["surjectivity_defect"] > 1e-3


def test_qutrit_mesh_lifts_mixtures_of_its_points() -> None:
    report = good_extension_report(misra_scheme(haar_mesh(3, 60, 2), 10, 3))
    assert "NOT_SURJECTIVE" not in report.flags
    assert report.metrics["surjectivity_defect"] <= 1e-9
    assert report.metrics["dual_rank"] == 9
    assert report.metrics["approximation_defect"] > 0.0
