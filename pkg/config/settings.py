"""
Configuration settings for the shadowing lab.
"""

from functools import lru_cache
from pathlib import Path
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from src.utils.constants import (
    DEFAULT_ALGEBRA_TOL,
    DEFAULT_GAP_TOL,
    DEFAULT_GRID_TOL,
    DEFAULT_K_ROUNDUP,
    DEFAULT_SPLIT_SAMPLES,
    EIG_CONDITION_LIMIT,
)

# Find project root (where .env file is located)
_caller_file = Path(__file__)
if _caller_file.parent.name == "config":
    PROJECT_ROOT = _caller_file.parent.parent.absolute()
else:
    PROJECT_ROOT = _caller_file.parent.absolute()
ENV_FILE_PATH = PROJECT_ROOT / ".env"


class Settings(BaseSettings):
    """Lab settings loaded from SHADOWLAB_* environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="SHADOWLAB_",
        env_file=str(ENV_FILE_PATH),
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Logging
    log_level: str = Field(default="INFO", description="Minimum level for the stderr sink")
    log_file: Optional[Path] = Field(default=None, description="Optional rotating log file")

    # Numerical tolerances
    algebra_tol: float = Field(default=DEFAULT_ALGEBRA_TOL, gt=0)
    grid_tol: float = Field(default=DEFAULT_GRID_TOL, gt=0)
    eig_condition_limit: float = Field(default=EIG_CONDITION_LIMIT, gt=1)
    gap_tol: float = Field(default=DEFAULT_GAP_TOL, gt=0)

    # Splitting certification
    split_samples: int = Field(default=DEFAULT_SPLIT_SAMPLES, ge=2)
    k_roundup: float = Field(default=DEFAULT_K_ROUNDUP, ge=1)

    # Parallel Processing
    max_workers: int = Field(default=4, ge=1)

    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        if self.log_file is not None:
            self.log_file.parent.mkdir(parents=True, exist_ok=True)


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Return the process-wide settings instance."""
    return Settings()
