"""
Synthetic corpus specification
"""

from pydantic import BaseModel, ConfigDict, Field, model_validator


class SyntheticSpec(BaseModel):
    """
    Shape of a generated desk-scale corpus

    Counts are per bug and per run. failed_* includes the planted TPs, the
    remaining failed tests are FPs.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    bugs: int = Field(..., ge=0)
    failed_min: int = Field(..., ge=0)
    failed_max: int = Field(..., ge=0)
    tp_min: int = Field(1, ge=0)
    tp_max: int = Field(1, ge=0)
    passed_per_bug: int = Field(0, ge=0)
    fn_per_bug: int = Field(0, ge=0)
    compile_errors_per_bug: int = Field(0, ge=0)
    runs: int = Field(1, ge=1)
    fixed_fraction: float = Field(0.0, ge=0.0, le=1.0)
    distinct_lines: int = Field(3, ge=0)
    doc_similarity: bool = True

    @model_validator(mode="after")
    def check_ranges(self) -> "SyntheticSpec":
        if self.failed_min > self.failed_max:
            raise ValueError("failed_min must not exceed failed_max")
        if self.tp_min > self.tp_max:
            raise ValueError("tp_min must not exceed tp_max")
        if self.tp_max > self.failed_min:
            raise ValueError("tp_max must not exceed failed_min")
        return self
