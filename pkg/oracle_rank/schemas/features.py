"""
Ranking feature schemas
"""

from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from oracle_rank.schemas.corpus import TestRecord
from oracle_rank.schemas.trace import ParsedTrace

# field order of FeatureVector, also the column order of the feature matrix
FEATURE_NAMES: Tuple[str, ...] = (
    "focal_method_name_count",
    "test_distinct_code_line",
    "is_exception",
    "is_no_exception",
    "test_prefix_exception",
    "trace_exception_count",
    "trace_exception_msg_count",
    "is_exp_trace_exception",
    "unexp_trace_e_count",
    "focal_unexp_trace_e_count",
    "test_doc_sim",
)


class FeatureVector(BaseModel):
    """The eleven per-test ranking features"""

    model_config = ConfigDict(frozen=True)

    # Oracle generator input and output
    focal_method_name_count: int = Field(..., ge=0)
    test_distinct_code_line: int = Field(..., ge=0)
    is_exception: int = Field(..., ge=0, le=1)
    is_no_exception: int = Field(..., ge=0, le=1)
    # Execution output
    test_prefix_exception: int = Field(..., ge=0, le=1)
    trace_exception_count: int = Field(..., ge=0)
    trace_exception_msg_count: int = Field(..., ge=0)
    is_exp_trace_exception: int = Field(..., ge=0, le=1)
    unexp_trace_e_count: int = Field(..., ge=0)
    focal_unexp_trace_e_count: int = Field(..., ge=0)
    # Text similarity
    test_doc_sim: float = Field(..., ge=0.0, le=1.0)

    def to_array(self) -> np.ndarray:
        """Values in FEATURE_NAMES order"""
        return np.array([getattr(self, name) for name in FEATURE_NAMES], dtype=float)


class FailedTest(BaseModel):
    """A failed-on-buggy test with its parsed trace"""

    model_config = ConfigDict(frozen=True)

    record: TestRecord
    trace: ParsedTrace

    @property
    def record_id(self) -> str:
        return self.record.record_id
