"""Global lab configuration."""

import os
from pathlib import Path
from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


def default_worker_count() -> int:
    """Get a conservative default for the sweep worker pool.

    Returns:
        Half the visible CPUs, at least one.
    """
    return max(1, (os.cpu_count() or 2) // 2)


class LabSettings(BaseSettings):
    """Global settings for WaveLab.

    These settings are loaded from environment variables.
    """

    model_config = SettingsConfigDict(
        env_prefix="WAVELAB_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Logging
    log_level: str = Field(default="INFO", description="Logging level")
    log_dir: Path | None = Field(default=None, description="Directory for per-run log files")

    # Sweep execution
    workers: int = Field(
        default_factory=default_worker_count,
        ge=1,
        description="Worker processes used for lifespan sweeps and persistence runs",
    )

    # Outputs
    output_dir: Path = Field(
        default_factory=lambda: Path("results"),
        description="Directory where CSV/JSON artifacts are written when a config does not name one",
    )
    checkpoint_format: Literal["npz", "csv"] = Field(
        default="npz",
        description="Default format for field checkpoints",
    )

    # Monte-Carlo reproducibility
    default_seed: int = Field(default=0, description="Seed used when neither config nor --seed provides one")

    @property
    def parallel(self) -> bool:
        """Check if sweeps should use a process pool."""
        return self.workers > 1


def get_settings() -> LabSettings:
    """Get the global lab settings.

    Settings are loaded from environment variables with the WAVELAB_ prefix.
    """
    return LabSettings()
