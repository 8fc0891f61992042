"""Centralized configuration via pydantic-settings, loaded from env / .env."""

from __future__ import annotations

import functools

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="OPMODEL_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # ── Reproducibility ────────────────────────────────────────────────
    seed: int = 20030321

    # ── Tolerances ─────────────────────────────────────────────────────
    tol: float = 1e-9  # Hermiticity / trace / normalization defects
    tol_psd: float = 1e-9  # eigenvalue positivity
    tol_lp: float = 1e-8  # LP constraint residuals
    lp_max_iterations: int = 10000

    # ── Demonstrations ─────────────────────────────────────────────────
    mesh_size: int = 10000
    embed_samples: int = 100
    chsh_sweep: int = 100000
    wigner_points: int = 256
    wigner_extent: float = 8.0
    wigner_p_extent: float = 8.0

    # ── Output ─────────────────────────────────────────────────────────
    report_digits: int = 9
    log_level: str = "INFO"

    @property
    def tolerances(self) -> dict[str, float]:
        """Tolerances echoed into every report."""
        return {"tol": self.tol, "tol_psd": self.tol_psd, "tol_lp": self.tol_lp}


@functools.lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Singleton accessor for the global settings."""
    return Settings()
