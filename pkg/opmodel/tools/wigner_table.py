"""Wigner table of a reference state behind ``wigner``.

CSV columns: q, p, W (long format, q-major).
"""

from __future__ import annotations

import logging
from typing import Any

from opmodel.quantum.wigner import (
    DEFAULT_EXTENT,
    DEFAULT_POINTS,
    coherent_state,
    first_excited_state,
    ground_state,
    negativity_certificate,
    to_frame,
    uniform_grid,
    wigner_marginals,
    wigner_transform,
)
from opmodel.tools.reports import write_csv
from opmodel.utils import OpModelError

logger = logging.getLogger(__name__)

STATES = ("gauss", "hermite1", "coherent")


def run_wigner(
    *,
    state: str = "gauss",
    points: int = DEFAULT_POINTS,
    extent: float = DEFAULT_EXTENT,
    p_extent: float = DEFAULT_EXTENT,
    q0: float = 0.0,
    p0: float = 0.0,
    csv_path: str | None = None,
) -> dict[str, Any]:
    grid = uniform_grid(extent, points)
    if state == "gauss":
        psi = ground_state(grid)
    elif state == "hermite1":
        psi = first_excited_state(grid)
    elif state == "coherent":
        psi = coherent_state(grid, q0, p0)
    else:
        raise OpModelError("UNKNOWN_STATE", f"{state!r} not in {STATES}")

    table = wigner_transform(psi, uniform_grid(p_extent, points))
    marginals = wigner_marginals(table)
    cert = negativity_certificate(table)
    if csv_path:
        write_csv(to_frame(table), csv_path)
    logger.info("wigner %s: min %.6f at (%.3f, %.3f)", state, cert.min_value, cert.q, cert.p)
    return {
        "state": state,
        "points": points,
        "extent": extent,
        "p_extent": p_extent,
        "min": cert.min_value,
        "argmin": {"q": cert.q, "p": cert.p},
        "negative": cert.negative,
        "normalization": table.normalization,
        "position_marginal_error": marginals.position_error,
        "momentum_marginal_error": marginals.momentum_error,
        "csv": csv_path,
    }
