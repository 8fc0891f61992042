"""Pure-state mesh diagnostics behind ``mb``: fuzziness of a lifted
projection, lifted-vs-quantum pairing, and the two-preimage demo."""

from __future__ import annotations

import logging
from typing import Any

import numpy as np

from opmodel.embedding.canonical import (
    AtomicMeasure,
    bloch_mesh,
    expectation,
    fuzziness_profile,
    haar_mesh,
    lift_effect,
    preimage_multiplicity_demo,
    reduce,
)
from opmodel.quantum.hilbert import ket, projector
from opmodel.quantum.operators import pair_raw
from opmodel.tools.reports import EffectFile, load_file, write_csv
from opmodel.utils import as_rng

logger = logging.getLogger(__name__)

ATOMS = 20


def load_effect(spec: str) -> np.ndarray:
    if spec == "z-projection":
        return projector(ket(2, 0))
    return load_file(spec, EffectFile).to_matrix()


def run_mb(
    *,
    mesh: int = 10_000,
    effect: str = "z-projection",
    allow_fuzzy: bool = False,
    samples: int = 500,
    seed: int | None = None,
    csv_path: str | None = None,
) -> dict[str, Any]:
    rng = as_rng(seed)
    a = load_effect(effect)
    d = a.shape[0]
    points = bloch_mesh(mesh) if d == 2 else haar_mesh(d, mesh, rng)
    profile = fuzziness_profile(a, points, allow_fuzzy=allow_fuzzy)

    picks = np.sort(rng.choice(len(points), size=min(ATOMS, len(points)), replace=False))
    mu = AtomicMeasure(points.projectors[picks], rng.dirichlet(np.ones(picks.size)))
    lifted = expectation(mu, lift_effect(a))
    quantum = pair_raw(reduce(mu), a).real

    demo = preimage_multiplicity_demo(samples, rng)
    if csv_path:
        write_csv(profile.as_frame(), csv_path)
    logger.info("mb: f range [%.3e, %.6f] on %d points", profile.min_value, profile.max_value, len(points))
    return {
        "effect": effect,
        "mesh": points.generator,
        "profile": profile.as_dict(),
        "lift_gap": abs(lifted - quantum),
        "preimage": demo.as_dict(),
    }
