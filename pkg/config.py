"""
Runtime settings for the near-field beam-training simulator.

Values come from NFBT_-prefixed environment variables or a .env file;
experiment parameters themselves live in JSON config files (see cli.py).
"""
import os
from pathlib import Path
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-wide settings with environment variable support."""

    seed: Optional[int] = Field(
        default=None,
        ge=0,
        description="Master seed override (NFBT_SEED); beats the config file, loses to --seed"
    )
    threads: int = Field(
        default=1,
        ge=1,
        description="Default worker thread count for Monte Carlo trials"
    )
    output_dir: str = Field(
        default="output",
        description="Directory for CSV/JSON artifacts when --out is not given"
    )
    codebook_cache_dir: str = Field(
        default="storage/codebooks",
        description="Directory holding serialized codebooks"
    )
    log_level: str = Field(
        default="INFO",
        description="Root log level"
    )
    log_file: Optional[str] = Field(
        default=None,
        description="Optional log file; console logging always goes to stderr"
    )

    model_config = SettingsConfigDict(
        env_prefix="NFBT_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )


class DevelopmentSettings(Settings):
    """Development-specific settings."""

    log_level: str = "DEBUG"


class ProductionSettings(Settings):
    """Batch-cluster settings."""

    log_level: str = "INFO"
    threads: int = 4


def get_settings() -> Settings:
    """Get appropriate settings based on environment."""
    env = os.getenv("ENVIRONMENT", "default").lower()

    env_file = f".env.{env}"
    if Path(env_file).exists():
        os.environ.setdefault("ENV_FILE", env_file)

    if env == "production":
        return ProductionSettings()
    if env == "development":
        return DevelopmentSettings()
    return Settings()


settings = get_settings()
