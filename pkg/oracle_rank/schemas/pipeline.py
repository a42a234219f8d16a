"""
Per-invocation pipeline configuration
"""

from enum import Enum
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from oracle_rank.schemas.ranking import RankingMethod


class ProvenanceFilter(str, Enum):
    BUGGY = "buggy"
    FIXED = "fixed"
    ALL = "all"


class PipelineConfig(BaseModel):
    """Validated configuration of one evaluate / rank invocation"""

    records_path: Path
    outcomes_path: Path
    out_dir: Path
    k_values: List[int] = Field(default_factory=lambda: [1, 3, 5, 10])
    ranking: RankingMethod = RankingMethod.IFOREST
    seeds: List[int] = Field(default_factory=list)
    baseline_noexception: bool = False
    provenance: ProvenanceFilter = ProvenanceFilter.BUGGY
    num_trees: int = Field(100, ge=1)
    max_samples: int = Field(256, ge=1)
    threads: int = Field(1, ge=1)
    show_progress: bool = False
    correlation_id: Optional[str] = None

    @field_validator("k_values")
    @classmethod
    def validate_k_values(cls, v: List[int]) -> List[int]:
        if not v:
            raise ValueError("at least one K value is required")
        if any(k < 1 for k in v):
            raise ValueError("K values must be positive")
        return sorted(set(v))

    @model_validator(mode="after")
    def check_seeds(self) -> "PipelineConfig":
        if self.ranking != RankingMethod.NONE and not self.seeds:
            raise ValueError("seeds must be non-empty when a ranking method is selected")
        return self

    def describe(self) -> dict:
        """Configuration echoed into reports; paths are left out so reports do not depend on them"""
        return {
            "k_values": self.k_values,
            "ranking": self.ranking.value,
            "seeds": self.seeds,
            "baseline_noexception": self.baseline_noexception,
            "provenance": self.provenance.value,
            "num_trees": self.num_trees,
            "max_samples": self.max_samples,
        }
