"""Runtime settings following 12-factor app principles."""

from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Process-level settings.

    All settings can be overridden via environment variables
    with the LITTLEBIRD_ prefix.

    Example:
        LITTLEBIRD_SEED=7
        LITTLEBIRD_LOG_LEVEL=DEBUG
    """

    model_config = SettingsConfigDict(
        env_prefix="LITTLEBIRD_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
    )

    seed: int = Field(
        default=0,
        ge=0,
        description="Seed for the PCG64 generator, applied once per run",
    )
    float_bits: int = Field(
        default=64,
        description="Tensor precision for benchmarks (64 or 32); correctness paths always use 64",
    )

    # Logging settings
    log_level: str = Field(
        default="INFO",
        description="Logging level (DEBUG, INFO, WARNING, ERROR)",
    )
    log_format: str = Field(
        default="json",
        description="Log output format (json, console)",
    )

    # I/O settings
    default_encoding: str = Field(
        default="utf-8",
        description="Encoding of corpus files",
    )
    out_dir: Path = Field(
        default=Path("runs"),
        description="Default directory for CSV, checkpoints and heatmaps",
    )
