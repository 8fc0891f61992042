"""Versioned JSON file schemas and report/CSV writers for the CLI."""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Literal

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from opmodel import __version__
from opmodel.embedding.maps import AffineStateMap, FiniteModelSpec
from opmodel.utils import OpModelError, round_sig, utc_now

logger = logging.getLogger(__name__)

SCHEMA = "opmodel/1"

CONVENTIONS = {"classical": "simplex", "qubit": "cayley", "qudit": "hilbert-schmidt"}


class _SchemaFile(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    schema_tag: Literal["opmodel/1"] = Field(SCHEMA, alias="schema")


# ── Input files ───────────────────────────────────────────────────────

class ModelRef(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["classical", "qubit", "qudit"]
    n: int | None = None
    d: int | None = None
    labels: list[str] | None = None

    @model_validator(mode="after")
    def _sizes(self) -> ModelRef:
        if self.kind == "classical" and (self.n is None or self.n < 1):
            raise ValueError("classical models need n >= 1")
        if self.kind == "qudit" and (self.d is None or self.d < 2):
            raise ValueError("qudit models need d >= 2")
        if self.kind == "qubit" and self.d not in (None, 2):
            raise ValueError("qubit models have d = 2")
        return self

    def to_spec(self) -> FiniteModelSpec:
        if self.kind == "classical":
            return FiniteModelSpec.classical(int(self.n or 0), self.labels or ())
        if self.kind == "qubit":
            return FiniteModelSpec.qubit()
        return FiniteModelSpec.qudit(int(self.d or 0))


class ModelFile(_SchemaFile, ModelRef):
    """``{"schema": "opmodel/1", "kind": "classical", "n": 4}``."""


class MapFile(_SchemaFile):
    """A state map as a row-major matrix acting on coordinates.

    ``convention`` names the coordinates on both sides, e.g.
    ``"simplex->simplex"`` or ``"hilbert-schmidt->cayley"``.
    """

    source: ModelRef
    target: ModelRef
    matrix: list[list[float]]
    convention: str | None = None
    name: str = ""

    @model_validator(mode="after")
    def _convention(self) -> MapFile:
        expected = f"{CONVENTIONS[self.source.kind]}->{CONVENTIONS[self.target.kind]}"
        if self.convention is not None and self.convention != expected:
            raise ValueError(f"convention {self.convention!r} does not match models, expected {expected!r}")
        return self

    def to_map(self) -> AffineStateMap:
        return AffineStateMap(self.source.to_spec(), self.target.to_spec(), np.array(self.matrix, dtype=float), self.name)


class EffectFile(_SchemaFile):
    """A d×d effect as real and imaginary parts."""

    d: int = Field(ge=2)
    real: list[list[float]]
    imag: list[list[float]] | None = None

    def to_matrix(self) -> np.ndarray:
        m = np.array(self.real, dtype=float).astype(complex)
        if self.imag is not None:
            m = m + 1j * np.array(self.imag, dtype=float)
        if m.shape != (self.d, self.d):
            raise OpModelError("DIMENSION_MISMATCH", f"effect file declares d={self.d}, matrix is {m.shape}")
        return m


class ReportFile(_SchemaFile):
    command: str
    argv: list[str]
    version: str = __version__
    seed: int | None = None
    tolerances: dict[str, float]
    verdict: str | None = None
    results: dict[str, Any]
    timestamp: str | None = None


# ── Loading ───────────────────────────────────────────────────────────

def load_json(path: str | Path) -> Any:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise OpModelError("UNREADABLE_PATH", f"{p}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise OpModelError("PARSE_ERROR", f"{p}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def load_file(path: str | Path, model: type[BaseModel]) -> Any:
    data = load_json(path)
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(x) for x in first.get("loc", ())) or "<root>"
        raise OpModelError("SCHEMA_ERROR", f"{path}: {where}: {first.get('msg')}") from exc


# ── Writing ───────────────────────────────────────────────────────────

def build_report(
    command: str,
    argv: list[str],
    *,
    seed: int | None,
    tolerances: dict[str, float],
    results: dict[str, Any],
    verdict: str | None = None,
    timestamp: bool = True,
) -> ReportFile:
    return ReportFile(
        command=command,
        argv=list(argv),
        seed=seed,
        tolerances=tolerances,
        verdict=verdict,
        results=results,
        timestamp=utc_now().isoformat() if timestamp else None,
    )


def render_report(report: ReportFile, digits: int = 9) -> str:
    payload = round_sig(report.model_dump(by_alias=True, mode="python"), digits)
    return json.dumps(payload, indent=2, default=str)


def write_text(path: str | Path, text: str) -> None:
    p = Path(path)
    try:
        p.write_text(text + "\n", encoding="utf-8")
    except OSError as exc:
        raise OpModelError("UNWRITABLE_PATH", f"{p}: {exc.strerror}") from exc


def write_csv(frame: pd.DataFrame, path: str | Path, digits: int = 9) -> None:
    p = Path(path)
    try:
        frame.to_csv(p, index=False, float_format=f"%.{digits}g")
    except OSError as exc:
        raise OpModelError("UNWRITABLE_PATH", f"{p}: {exc.strerror}") from exc
    logger.info("wrote %d rows to %s", len(frame), p)
