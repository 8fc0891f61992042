"""CHSH correlations through pure-state kernels, behind ``chsh``.

Angles are polarizer angles θ in degrees; the measured spin direction is
the Bloch vector (sin 2θ, 0, cos 2θ), so orthogonal polarizers (θ and
θ + 90) are antipodal on the sphere.
"""

from __future__ import annotations

import argparse
import logging
from typing import Any

import numpy as np

from opmodel.embedding.canonical import chsh_classical, chsh_sweep
from opmodel.tools.reports import write_csv

logger = logging.getLogger(__name__)

TSIRELSON_ANGLES = (0.0, 45.0, 22.5, -22.5)


def parse_angles(text: str) -> tuple[float, float, float, float]:
    """``"a,a',b,b'"`` in degrees."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(f"expected four comma-separated angles, got {text!r}")
    try:
        values = tuple(float(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad angle in {text!r}") from exc
    if not all(np.isfinite(values)):
        raise argparse.ArgumentTypeError(f"angles must be finite, got {text!r}")
    return values  # type: ignore[return-value]


def direction(degrees: float) -> np.ndarray:
    t = np.deg2rad(2.0 * degrees)
    return np.array([np.sin(t), 0.0, np.cos(t)])


def run_chsh(
    *,
    angles: tuple[float, float, float, float] = TSIRELSON_ANGLES,
    sweep: int | None = None,
    seed: int | None = None,
    csv_path: str | None = None,
) -> dict[str, Any]:
    dirs = [direction(a) for a in angles]
    result = chsh_classical(*dirs)
    out: dict[str, Any] = {
        "angles_deg": list(angles),
        "directions": {k: d for k, d in zip(("a", "a'", "b", "b'"), dirs)},
        **result.as_dict(),
    }
    if sweep:
        out["sweep"] = chsh_sweep(sweep, seed).as_dict()
    if csv_path:
        write_csv(result.as_frame(), csv_path)
    logger.info("chsh S = %.9f (gap %.3e)", result.S, result.gap)
    return out
