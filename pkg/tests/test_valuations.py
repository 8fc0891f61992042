from __future__ import annotations

import numpy as np
import pytest

from opmodel.quantum.hilbert import identity, ket, projector, random_density, random_effect, to_coords
from opmodel.quantum.operators import effect_leq, trace_norm
from opmodel.quantum.valuations import (
    EffectValuation,
    effect_operator_basis,
    projection_family,
    squared_rule,
    state_from_valuation,
    trace_rule,
    valuation_from_rule,
    verify_additivity,
)
from opmodel.utils import OpModelError


@pytest.mark.parametrize("d", [2, 3, 4])
def test_projection_family_spans_hermitian_operators(d: int) -> None:
    family = projection_family(d)
    assert len(family) == d * d
    assert np.linalg.matrix_rank(np.stack([to_coords(p) for p in family])) == d * d


@pytest.mark.parametrize("d", [2, 3])
def test_effect_basis_is_independent_and_below_identity(d: int) -> None:
    basis = effect_operator_basis(d)
    assert len(basis) == d * d
    assert np.linalg.matrix_rank(np.stack([to_coords(e.matrix) for e in basis])) == d * d
    assert effect_leq(sum(e.matrix for e in basis), identity(d))


def test_qubit_effect_basis_order() -> None:
    basis = effect_operator_basis(2)
    assert np.allclose(4.0 * basis[0].matrix, identity(2))
    assert np.allclose(4.0 * basis[3].matrix, projector(ket(2, 0)))


@pytest.mark.parametrize("d", [2, 3])
def test_trace_rule_reconstructs_its_state(d: int) -> None:
    rng = np.random.default_rng(20030321 + d)
    family = projection_family(d)
    for _ in range(100):
        rho = random_density(d, rng)
        rec = state_from_valuation(valuation_from_rule(trace_rule(rho), family))
        assert rec.valid
        assert trace_norm(rec.state.matrix - rho) <= 1e-9


@pytest.mark.parametrize("d", [2, 3])
def test_reconstruction_agrees_with_rule_on_fresh_effects(d: int) -> None:
    rng = np.random.default_rng(1957 + d)
    rho = random_density(d, rng)
    rule = trace_rule(rho)
    assert verify_additivity(rule, d, 1000, rng).additive
    rec = state_from_valuation(valuation_from_rule(rule, projection_family(d)))
    fitted = trace_rule(rec.state)
    for _ in range(1000):
        a = random_effect(d, rng)
        assert abs(fitted(a) - rule(a)) <= 1e-6


def test_trace_rule_on_effect_basis() -> None:
    rho = random_density(3, 4)
    rec = state_from_valuation(valuation_from_rule(trace_rule(rho), effect_operator_basis(3)))
    assert trace_norm(rec.state.matrix - rho) <= 1e-9


def test_squared_rule_on_a_basis_reports_bad_trace() -> None:
    v = valuation_from_rule(squared_rule(identity(2) / 2), projection_family(2))
    rec = state_from_valuation(v)
    assert not rec.valid
    assert "TRACE_NOT_ONE" in rec.report.flags
    assert rec.residual <= 1e-12
    assert np.allclose(rec.matrix, identity(2) / 4)


def test_zero_values_on_effect_basis_fail_as_a_state() -> None:
    v = EffectValuation(2, tuple(e.matrix for e in effect_operator_basis(2)), np.zeros(4))
    rec = state_from_valuation(v)
    assert not rec.valid
    assert "TRACE_NOT_ONE" in rec.report.flags
    with pytest.raises(OpModelError) as exc:
        _ = rec.state
    assert exc.value.code == "INVALID_STATE"


def test_over_determined_family_with_clashing_values_is_inconsistent() -> None:
    family = (*projection_family(2), projector(ket(2, 0)))
    v = EffectValuation(2, family, np.array([0.5, 0.5, 0.5, 0.5, 0.9]))
    with pytest.raises(OpModelError) as exc:
        state_from_valuation(v)
    assert exc.value.code == "INCONSISTENT_VALUES"


def test_over_determined_family_with_trace_rule_values_is_consistent() -> None:
    rho = random_density(2, 8)
    family = (*projection_family(2), projector(ket(2, 1)), identity(2) / 2)
    rec = state_from_valuation(valuation_from_rule(trace_rule(rho), family))
    assert rec.valid
    assert trace_norm(rec.state.matrix - rho) <= 1e-9


def test_non_positive_solution_is_reported_not_raised() -> None:
    v = EffectValuation(2, tuple(projection_family(2)), np.array([1.0, 0.0, 1.0, 0.5]))
    rec = state_from_valuation(v)
    assert not rec.valid
    assert "NEGATIVE_EIGENVALUE" in rec.report.flags
    with pytest.raises(OpModelError) as exc:
        _ = rec.state
    assert exc.value.code == "INVALID_STATE"


def test_family_that_does_not_span_is_rank_deficient() -> None:
    family = (projector(ket(2, 0)), projector(ket(2, 1)))
    with pytest.raises(OpModelError) as exc:
        state_from_valuation(EffectValuation(2, family, np.array([0.5, 0.5])))
    assert exc.value.code == "RANK_DEFICIENT"


def test_valuation_range_checks() -> None:
    family = tuple(projection_family(2))
    with pytest.raises(OpModelError) as exc:
        EffectValuation(2, family, np.array([1.2, 0.0, 0.5, 0.5]))
    assert exc.value.code == "INVALID_VALUATION"
    with pytest.raises(OpModelError) as exc:
        EffectValuation(2, family, np.array([0.5, 0.5, 0.5, 0.5]), unit_value=0.9)
    assert exc.value.code == "INVALID_VALUATION"
    with pytest.raises(OpModelError) as exc:
        EffectValuation(2, family, np.array([0.5, 0.5]))
    assert exc.value.code == "DIMENSION_MISMATCH"


@pytest.mark.parametrize("d", [2, 3])
def test_trace_rule_is_additive(d: int) -> None:
    report = verify_additivity(trace_rule(random_density(d, 1)), d, 100, 2)
    assert report.additive
    assert report.max_defect <= 1e-12
    assert report.as_dict()["flags"] == []


def test_squared_rule_fails_additivity() -> None:
    report = verify_additivity(squared_rule(random_density(2, 3)), 2, 100, 4)
    assert not report.additive
    assert report.flags == ["NOT_ADDITIVE"]
    assert report.worst_trial is not None
    assert report.normalization_defect <= 1e-12
