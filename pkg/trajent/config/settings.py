import os
from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Runtime settings are loaded from environment variables prefixed with
    ``TRAJENT_`` (or from a ``.env`` file in the working directory).
    """

    PROJECT_NAME: str = "trajent"
    THREADS: int = Field(0, ge=0, description="Worker threads, 0 = one per CPU")
    PRECISION: int = Field(4, ge=0, le=17, description="Default display decimals")
    LOG_LEVEL: str = "WARNING"
    ORACLE_RESIDUAL_MASS: float = Field(1e-12, gt=0, lt=1)
    ORACLE_MAX_PATHS: int = Field(10_000_000, ge=1)
    SIMULATION_SEED: int = 0

    model_config = SettingsConfigDict(
        env_prefix="TRAJENT_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    @property
    def worker_threads(self) -> int:
        """The number of threads to use, with 0 resolved to the CPU count."""
        return self.THREADS or os.cpu_count() or 1


@lru_cache
def get_settings() -> Settings:
    return Settings()
