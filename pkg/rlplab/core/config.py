"""
Configuration settings for rlplab
Centralized configuration management with environment variables
"""

import os
from typing import Optional

from dotenv import load_dotenv
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

# Ensure we load the project's .env explicitly
BASE_DIR = os.path.abspath(os.path.join(os.path.dirname(__file__), '..', '..'))
DOTENV_PATH = os.path.join(BASE_DIR, '.env')
load_dotenv(dotenv_path=DOTENV_PATH)


def _default_threads() -> int:
    """Worker count when RLPLAB_THREADS is not set"""
    return max(1, os.cpu_count() or 1)


class Settings(BaseSettings):
    """Application settings"""

    model_config = SettingsConfigDict(env_prefix="RLPLAB_", extra="ignore")

    # Application Info
    APP_NAME: str = "rlplab"
    APP_VERSION: str = "1.0.0"
    APP_DESCRIPTION: str = (
        "Rubio de Francia square function, sparse domination machinery and weights laboratory"
    )

    # Workers Configuration
    THREADS: int = Field(default_factory=_default_threads)

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    # Grid limits
    MIN_N: int = 16
    EXPERIMENT_MIN_N: int = 64
    EXPERIMENT_MAX_N: int = 8192

    # Exhaustive computations switch to dyadic restrictions above these sizes
    EXACT_MAXIMAL_LIMIT: int = 4096
    EXACT_CHARACTERISTIC_LIMIT: int = 4096
    EXACT_AINFTY_LIMIT: int = 256

    # Time-frequency defaults
    CHI_EXPONENT: int = 100
    DECAY_EXPONENT: int = 10
    TAPER_WIDTH: float = 0.125
    PACKET_DECAY: int = 3
    MAX_DECOMPOSITION_LEVELS: int = 64

    # Operator norm search
    POWER_STEPS: int = 25
    REFINED_CANDIDATES: int = 3

    # Sparse domination
    SPARSE_ETA: float = 1.0 / 6.0

    # Experiments
    DEFAULT_SEED: int = 0
    OUTPUT_DIR: str = "reports"
    REPORT_DIR_OVERRIDE: Optional[str] = None

    @field_validator("THREADS")
    @classmethod
    def validate_threads(cls, v):
        if v < 1:
            raise ValueError("RLPLAB_THREADS must be at least 1")
        return v

    @field_validator("LOG_LEVEL")
    @classmethod
    def validate_log_level(cls, v):
        return v.upper()

    @field_validator("TAPER_WIDTH")
    @classmethod
    def validate_taper(cls, v):
        if not 0.0 < v < 0.5:
            raise ValueError("RLPLAB_TAPER_WIDTH must lie in (0, 1/2)")
        return v


# Create settings instance
settings = Settings()
