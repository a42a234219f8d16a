"""
Ranking schemas
"""

from enum import Enum
from typing import List

from pydantic import BaseModel, ConfigDict, Field, model_validator


class RankingMethod(str, Enum):
    IFOREST = "iforest"
    RANDOM = "random"
    NONE = "none"


class RankedEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    record_id: str
    anomaly_score: float
    rank: int = Field(..., ge=1)


class RankedList(BaseModel):
    """Failed tests of one (bug, run), best candidate first"""

    model_config = ConfigDict(frozen=True)

    bug_id: str
    run_id: int
    entries: List[RankedEntry] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_ranks(self) -> "RankedList":
        if [entry.rank for entry in self.entries] != list(range(1, len(self.entries) + 1)):
            raise ValueError("ranks must be 1..n in list order")
        return self

    @property
    def record_ids(self) -> List[str]:
        return [entry.record_id for entry in self.entries]

    def restricted_to(self, record_ids) -> "RankedList":
        """
        Keep only the given records, preserving their relative order and re-numbering ranks
        """
        keep = set(record_ids)
        kept = [entry for entry in self.entries if entry.record_id in keep]
        return RankedList(
            bug_id=self.bug_id,
            run_id=self.run_id,
            entries=[
                RankedEntry(record_id=entry.record_id, anomaly_score=entry.anomaly_score, rank=i + 1)
                for i, entry in enumerate(kept)
            ],
        )
