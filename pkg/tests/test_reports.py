from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from opmodel.config import Settings
from opmodel.tools.reports import (
    EffectFile,
    MapFile,
    ModelFile,
    build_report,
    load_file,
    render_report,
)
from opmodel.utils import OpModelError, round_sig


def test_round_sig_handles_numpy_and_nesting() -> None:
    value = {"a": np.float64(1.23456789012345), "b": [np.int64(3), np.array([0.1, 2.0 / 3.0])], "c": float("nan")}
    assert round_sig(value, 4) == {"a": 1.235, "b": [3, [0.1, 0.6667]], "c": "nan"}
    assert round_sig(True) is True


def test_settings_read_prefixed_environment(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("OPMODEL_SEED", "5")
    monkeypatch.setenv("OPMODEL_TOL_LP", "1e-7")
    s = Settings()
    assert s.seed == 5
    assert s.tolerances == {"tol": 1e-9, "tol_psd": 1e-9, "tol_lp": 1e-7}


def test_model_file_defaults_schema(tmp_path: Path) -> None:
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"kind": "qudit", "d": 3}), encoding="utf-8")
    model = load_file(path, ModelFile)
    assert model.schema_tag == "opmodel/1"
    assert model.to_spec().coord_dim == 9


def test_unknown_fields_are_rejected(tmp_path: Path) -> None:
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"kind": "qubit", "colour": "red"}), encoding="utf-8")
    with pytest.raises(OpModelError) as exc:
        load_file(path, ModelFile)
    assert exc.value.code == "SCHEMA_ERROR"
    assert "colour" in exc.value.message


def test_map_file_builds_state_map() -> None:
    mf = MapFile.model_validate(
        {
            "source": {"kind": "qudit", "d": 2},
            "target": {"kind": "qubit"},
            "matrix": (np.sqrt(2.0) * np.eye(4)).tolist(),
            "convention": "hilbert-schmidt->cayley",
            "name": "cayley",
        }
    )
    phi = mf.to_map()
    assert phi.L.shape == (4, 4)
    assert phi.name == "cayley"


def test_effect_file_shape_is_checked() -> None:
    ef = EffectFile.model_validate({"d": 2, "real": [[1.0, 0.0, 0.0]]})
    with pytest.raises(OpModelError) as exc:
        ef.to_matrix()
    assert exc.value.code == "DIMENSION_MISMATCH"
    m = EffectFile.model_validate({"d": 2, "real": [[0.5, 0.0], [0.0, 0.5]], "imag": [[0.0, 0.1], [-0.1, 0.0]]})
    assert m.to_matrix()[0, 1] == pytest.approx(0.1j)


def test_rendered_report_uses_schema_alias() -> None:
    report = build_report(
        "tomography",
        ["tomography"],
        seed=1,
        tolerances={"tol": 1e-9},
        results={"max_error": 1.0 / 3.0},
        timestamp=False,
    )
    payload = json.loads(render_report(report))
    assert payload["schema"] == "opmodel/1"
    assert "schema_tag" not in payload
    assert payload["results"]["max_error"] == 0.333333333
    assert payload["timestamp"] is None
