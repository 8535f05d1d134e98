"""Toolkit configuration loaded from environment variables."""

from __future__ import annotations

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """pstlab configuration. Every value may be overridden via PSTLAB_<NAME> or .env."""

    # ─── Spectra ───
    ODD_GAP_RTOL: float = 1e-9
    SPECTRUM_SYMMETRY_TOL: float = 1e-9
    DEGENERACY_RTOL: float = 1e-12
    MAX_GAP_DIVISOR: int = 21

    # ─── Chains ───
    MIRROR_RTOL: float = 1e-8
    FIELD_FREE_RTOL: float = 1e-9
    EIGEN_RESIDUAL_RTOL: float = 1e-10
    LANCZOS_ORTHOGONALITY_TOL: float = 1e-8

    # ─── Quadrature / windows ───
    QUAD_ABS_TOL: float = 1e-8
    QUAD_LIMIT: int = 500
    GAUSSIAN_TRUNCATION: float = 5.0

    # ─── Arrival width ───
    WIDTH_BISECTION_TOL: float = 1e-9
    WIDTH_SCAN_RESOLUTION: float = 0.05

    # ─── Revival ───
    THETA_CLAMP: float = 1e-6

    # ─── Monte Carlo ───
    MAX_RESAMPLES: int = 100
    DEFAULT_SAMPLES: int = 1000
    THREADS: int | None = None

    # ─── App ───
    LOG_LEVEL: str = "info"
    LOG_FORMAT: str = "console"

    model_config = {
        "env_prefix": "PSTLAB_",
        "env_file": ".env",
        "env_file_encoding": "utf-8",
        "extra": "ignore",
    }


settings = Settings()
