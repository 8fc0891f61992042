from __future__ import annotations

import numpy as np
import pytest

from opmodel.quantum.wigner import (
    WaveFunction,
    WignerTable,
    coherent_state,
    first_excited_state,
    ground_state,
    mix_tables,
    negativity_certificate,
    overlap,
    to_frame,
    uniform_grid,
    wigner_marginals,
    wigner_transform,
)
from opmodel.utils import OpModelError

GRID = uniform_grid(8.0, 256)


def test_grid_contains_origin() -> None:
    assert GRID.size == 256
    assert GRID[128] == 0.0
    with pytest.raises(OpModelError) as exc:
        uniform_grid(8.0, 1)
    assert exc.value.code == "INVALID_GRID"


def test_wave_function_must_be_normalized() -> None:
    with pytest.raises(OpModelError) as exc:
        WaveFunction(GRID, 2.0 * ground_state(GRID).values)
    assert exc.value.code == "UNNORMALIZED"


def test_ground_state_table_is_nonnegative() -> None:
    table = wigner_transform(ground_state(GRID))
    cert = negativity_certificate(table)
    assert cert.min_value >= -1e-6
    assert not cert.negative
    assert table.W[128, 128] == pytest.approx(1.0 / np.pi, abs=1e-6)


def test_first_excited_state_is_negative_at_origin() -> None:
    cert = negativity_certificate(wigner_transform(first_excited_state(GRID)))
    assert cert.negative
    assert cert.min_value == pytest.approx(-1.0 / np.pi, abs=1e-3)
    assert (cert.q, cert.p) == (0.0, 0.0)


@pytest.mark.parametrize("make", [ground_state, first_excited_state], ids=["gauss", "hermite1"])
def test_marginals_and_normalization(make) -> None:
    table = wigner_transform(make(GRID))
    marginals = wigner_marginals(table)
    assert marginals.position_error <= 1e-4
    assert marginals.momentum_error <= 1e-4
    assert table.normalization == pytest.approx(1.0, abs=1e-4)


def test_coherent_state_peaks_at_its_centre() -> None:
    table = wigner_transform(coherent_state(GRID, 1.0, -2.0))
    i, m = np.unravel_index(int(np.argmax(table.W)), table.W.shape)
    assert (table.q[i], table.p[m]) == (1.0, -2.0)
    assert table.W[i, m] == pytest.approx(1.0 / np.pi, abs=1e-6)


def test_overlap_is_state_fidelity() -> None:
    w0 = wigner_transform(ground_state(GRID))
    w1 = wigner_transform(first_excited_state(GRID))
    assert overlap(w0, w0) == pytest.approx(1.0, abs=1e-4)
    assert abs(overlap(w0, w1)) <= 1e-4


def test_mixture_is_affine() -> None:
    w0 = wigner_transform(ground_state(GRID))
    w1 = wigner_transform(first_excited_state(GRID))
    mixed = mix_tables(w0, w1, 0.5)
    assert mixed.normalization == pytest.approx(1.0, abs=1e-4)
    assert mixed.W[128, 128] == pytest.approx(0.0, abs=1e-3)
    assert wigner_marginals(mixed).position_error <= 1e-4
    with pytest.raises(OpModelError) as exc:
        mix_tables(w0, w1, 1.5)
    assert exc.value.code == "RANGE_VIOLATION"


def test_table_shape_is_checked() -> None:
    with pytest.raises(OpModelError) as exc:
        WignerTable(GRID, GRID[:10], np.zeros((256, 256)))
    assert exc.value.code == "DIMENSION_MISMATCH"


def test_long_frame_layout() -> None:
    q = uniform_grid(4.0, 32)
    frame = to_frame(wigner_transform(ground_state(q), q))
    assert list(frame.columns) == ["q", "p", "W"]
    assert len(frame) == 32 * 32
