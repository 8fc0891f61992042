"""Good-embedding and extension checks behind ``embed-check`` / ``ext-check``."""

from __future__ import annotations

import logging
from typing import Any

import numpy as np

from opmodel.classical.simplex import MAX_ITERATIONS, TOL_LP
from opmodel.embedding.canonical import bloch_mesh, misra_scheme
from opmodel.embedding.maps import (
    AffineStateMap,
    EmbeddingReport,
    FiniteModelSpec,
    cayley_embedding,
    compound_scheme,
    good_embedding_report,
    good_extension_report,
    identity_map,
    inverse_cayley_scheme,
    povm_embedding,
    reduced_model_report,
    sic_qubit_povm,
)
from opmodel.quantum.operators import TOL
from opmodel.tools.reports import MapFile, ModelFile, load_file
from opmodel.utils import OpModelError

logger = logging.getLogger(__name__)

EMBED_PRESETS = ("cayley", "sic", "identity")
EXT_PRESETS = ("compound", "misra", "inverse-cayley")

EXIT_CODES = {"good": 0, "not-good": 1, "inconclusive": 2}
MAX_VECTOR = 64


def _preset_map(preset: str) -> AffineStateMap:
    if preset == "cayley":
        return cayley_embedding()
    if preset == "sic":
        return povm_embedding(sic_qubit_povm())
    if preset == "identity":
        return identity_map(FiniteModelSpec.classical(4))
    raise OpModelError("UNKNOWN_PRESET", f"{preset!r} not in {EMBED_PRESETS}")


def _file_map(model_path: str, map_path: str | None) -> AffineStateMap:
    model = load_file(model_path, ModelFile).to_spec()
    if map_path is None:
        return identity_map(model)
    phi = load_file(map_path, MapFile).to_map()
    if (phi.source.kind, phi.source.size) != (model.kind, model.size):
        raise OpModelError(
            "DIMENSION_MISMATCH", f"map source is {phi.source.describe()}, model is {model.describe()}"
        )
    logger.info("loaded map %s: %s -> %s", map_path, phi.source.describe(), phi.target.describe())
    return phi


def _compact(vector: Any) -> Any:
    """Long coordinate vectors (mesh-sized) are reported by their range."""
    if vector is None or len(vector) <= MAX_VECTOR:
        return vector
    v = np.asarray(vector, dtype=float)
    return {"size": v.size, "min": float(v.min()), "max": float(v.max()), "sum": float(v.sum())}


def _summary(report: EmbeddingReport) -> dict[str, Any]:
    out = report.as_dict()
    for w in out["witnesses"]:
        for key in ("effect", "preimage", "certificate"):
            w[key] = _compact(w[key])
    out["infeasible_labels"] = [w.label for w in report.infeasible]
    return out


def run_embed_check(
    *,
    preset: str | None = None,
    model_path: str | None = None,
    map_path: str | None = None,
    reduced: bool = False,
    samples: int = 100,
    seed: int | None = None,
    tol: float = TOL,
    tol_lp: float = TOL_LP,
    max_iterations: int = MAX_ITERATIONS,
) -> dict[str, Any]:
    """Returns the report body; ``verdict`` is one of good / not-good / inconclusive."""
    if reduced:
        if preset != "sic":
            raise OpModelError("USAGE", "--reduced applies to the sic preset only")
        report = reduced_model_report(sic_qubit_povm(), tol=tol, tol_lp=tol_lp, max_iterations=max_iterations)
        return _summary(report)

    if preset is not None:
        phi = _preset_map(preset)
    elif model_path is not None:
        phi = _file_map(model_path, map_path)
    else:
        raise OpModelError("USAGE", "give --preset or --model")

    report = good_embedding_report(
        phi, count=samples, seed=seed, tol=tol, tol_lp=tol_lp, max_iterations=max_iterations
    )
    return _summary(report)


def run_ext_check(
    *,
    preset: str,
    mesh: int = 10_000,
    samples: int = 50,
    seed: int | None = None,
    tol: float = TOL,
) -> dict[str, Any]:
    if preset == "compound":
        scheme = compound_scheme(2, 2, samples, seed)
    elif preset == "misra":
        scheme = misra_scheme(bloch_mesh(mesh), samples, seed)
    elif preset == "inverse-cayley":
        scheme = inverse_cayley_scheme(samples, seed)
    else:
        raise OpModelError("UNKNOWN_PRESET", f"{preset!r} not in {EXT_PRESETS}")
    return _summary(good_extension_report(scheme, tol=tol))
