"""Round-trip checks behind ``tomography`` and ``gleason-effects``."""

from __future__ import annotations

import logging
from typing import Any

import numpy as np

from opmodel.embedding.maps import reconstruct_state, sic_qubit_povm
from opmodel.quantum.hilbert import identity, random_density, random_pure_state
from opmodel.quantum.operators import TOL, TOL_PSD, povm_probabilities, trace_norm
from opmodel.quantum.valuations import (
    projection_family,
    squared_rule,
    state_from_valuation,
    trace_rule,
    valuation_from_rule,
    verify_additivity,
)
from opmodel.utils import as_rng

logger = logging.getLogger(__name__)


def _trial_state(t: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """Trial 0 is I/d; later trials alternate mixed and pure random states."""
    if t == 0:
        return identity(d) / d
    return random_density(d, rng) if t % 2 else random_pure_state(d, rng)


def run_tomography(
    *, trials: int = 100, seed: int | None = None, tol: float = TOL, tol_psd: float = TOL_PSD
) -> dict[str, Any]:
    """SIC-POVM statistics of random qubit states, inverted back to states."""
    rng = as_rng(seed)
    E = sic_qubit_povm()
    errors = np.zeros(trials)
    residuals = np.zeros(trials)
    for t in range(trials):
        rho = _trial_state(t, 2, rng)
        rec = reconstruct_state(E, povm_probabilities(rho, E), tol=tol, tol_psd=tol_psd)
        errors[t] = trace_norm(rec.matrix - rho, hermitian=True)
        residuals[t] = rec.residual
    worst = int(np.argmax(errors))
    logger.info("tomography: %d trials, max trace-norm error %.3e", trials, errors[worst])
    return {
        "povm": "sic-qubit",
        "trials": trials,
        "max_error": float(errors[worst]),
        "mean_error": float(errors.mean()),
        "worst_trial": worst,
        "first_error": float(errors[0]),
        "max_residual": float(residuals.max()),
    }


def run_gleason_effects(
    *,
    dim: int = 2,
    trials: int = 100,
    seed: int | None = None,
    tol: float = TOL,
    tol_psd: float = TOL_PSD,
) -> dict[str, Any]:
    """Trace-rule valuations rebuild their state; the squared rule fails additivity."""
    rng = as_rng(seed)
    family = projection_family(dim)
    errors = np.zeros(trials)
    for t in range(trials):
        rho = _trial_state(t, dim, rng)
        rec = state_from_valuation(valuation_from_rule(trace_rule(rho), family), tol=tol, tol_psd=tol_psd)
        errors[t] = trace_norm(rec.state.matrix - rho)

    witness = random_density(dim, rng)
    linear = verify_additivity(trace_rule(witness), dim, trials, rng, tol=tol)
    squared = verify_additivity(squared_rule(witness), dim, trials, rng, tol=tol)
    logger.info("gleason-effects d=%d: max error %.3e, squared rule flags %s", dim, errors.max(), squared.flags)
    return {
        "dim": dim,
        "trials": trials,
        "family_size": len(family),
        "max_reconstruction_error": float(errors.max()),
        "trace_rule": linear.as_dict(),
        "squared_rule": squared.as_dict(),
    }
