"""
Application configuration
"""

from typing import List
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # Parallelism
    threads: int = Field(1, ge=1)  # ORACLE_RANK_THREADS caps the per-bug worker pool

    # Isolation Forest defaults (scikit-learn's documented defaults)
    iforest_num_trees: int = Field(100, ge=1)
    iforest_max_samples: int = Field(256, ge=1)
    ranking_repeats: int = Field(10, ge=1)  # random states per bug

    # Metrics
    default_k_values: List[int] = [1, 3, 5, 10]

    # Statistics
    significance_level: float = Field(0.05, gt=0.0, lt=1.0)
    exact_wilcoxon_max_n: int = Field(25, ge=0, le=60)  # sign enumeration counts stay exact below 2**63

    # Logging Configuration
    log_level: str = "INFO"
    log_format: str = "text"  # text, structured
    show_progress: bool = False

    model_config = SettingsConfigDict(
        env_prefix="ORACLE_RANK_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    @field_validator("log_format")
    @classmethod
    def validate_log_format(cls, v: str) -> str:
        if v not in ("text", "structured"):
            raise ValueError("log_format must be 'text' or 'structured'")
        return v

    @property
    def default_seeds(self) -> List[int]:
        """Seeds used when the CLI is not given --seeds"""
        return list(range(self.ranking_repeats))


settings = Settings()
