"""
Significance test schemas
"""

from enum import Enum
from typing import List

from pydantic import BaseModel, ConfigDict, Field, model_validator


class EffectMagnitude(str, Enum):
    NEGLIGIBLE = "Negligible"
    SMALL = "Small"
    MEDIUM = "Medium"
    LARGE = "Large"

    @property
    def order(self) -> int:
        return list(EffectMagnitude).index(self)


class PairedSample(BaseModel):
    """Two metric vectors paired per run or per seed"""

    model_config = ConfigDict(frozen=True)

    a: List[float] = Field(..., min_length=1)
    b: List[float] = Field(..., min_length=1)

    @model_validator(mode="after")
    def check_lengths(self) -> "PairedSample":
        if len(self.a) != len(self.b):
            raise ValueError(f"paired samples differ in length: {len(self.a)} vs {len(self.b)}")
        return self


class EffectSize(BaseModel):
    model_config = ConfigDict(frozen=True)

    delta: float = Field(..., ge=-1.0, le=1.0)
    magnitude: EffectMagnitude


class WilcoxonResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    statistic: float
    p_value: float = Field(..., ge=0.0, le=1.0)
    n_effective: int = Field(..., ge=0)
    method: str = Field(..., description="exact, approx or degenerate")


class ComparisonResult(BaseModel):
    """Per-metric verdict of one paired comparison"""

    metric: str
    mean_a: float
    mean_b: float
    statistic: float
    p_value: float
    delta: float
    magnitude: EffectMagnitude
    significant: bool
    method: str
    n: int
