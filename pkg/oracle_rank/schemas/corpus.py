"""
Corpus schemas: generated test records, their execution outcomes and the join
"""

from enum import Enum
from typing import ClassVar, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from oracle_rank.deps.utils import normalize_whitespace


class OracleKind(str, Enum):
    """Kind of oracle appended to a test prefix"""
    EXPECT_NO_EXCEPTION = "ExpectNoException"
    EXPECT_EXCEPTION = "ExpectException"
    ASSERTION = "Assertion"


class PrefixProvenance(str, Enum):
    """Program version the test prefix was generated from"""
    BUGGY = "BuggyVersion"
    FIXED = "FixedVersion"


class ExecutionResult(str, Enum):
    PASS = "pass"
    FAIL = "fail"


class FailureKind(str, Enum):
    """What made a test fail on one program version"""
    EXCEPTION = "exception"
    ASSERTION = "assertion"
    NONE = "none"


class OutcomeClass(str, Enum):
    """Positive = fails on buggy; True = passes on fixed"""
    TP = "TP"
    FP = "FP"
    TN = "TN"
    FN = "FN"


class TestRecord(BaseModel):
    """One generated test case: prefix, oracle and focal context"""

    __test__: ClassVar[bool] = False  # not a pytest test class

    model_config = ConfigDict(frozen=True, extra="forbid")

    record_id: str = Field(..., min_length=1)
    bug_id: str = Field(..., min_length=1, description="Benchmark bug id, e.g. Math-1")
    run_id: int = Field(..., ge=0, description="Prefix-generation run index")
    prefix_source: str
    oracle_kind: OracleKind
    oracle_text: Optional[str] = None
    focal_method_name: str
    focal_method_source: str = ""
    focal_docstring: str = ""
    prefix_provenance: PrefixProvenance = PrefixProvenance.BUGGY

    @model_validator(mode="after")
    def check_assertion_text(self) -> "TestRecord":
        if self.oracle_kind == OracleKind.ASSERTION and not (self.oracle_text or "").strip():
            raise ValueError("Assertion oracles need a non-empty oracle_text")
        return self

    @property
    def full_source(self) -> str:
        """Prefix followed by the oracle statement, if any"""
        if self.oracle_text:
            return f"{self.prefix_source}\n{self.oracle_text}"
        return self.prefix_source

    def duplicate_key(self) -> Tuple[str, int, str]:
        """Equality key used by deduplication; the oracle kind is not part of it"""
        source = normalize_whitespace(
            f"{normalize_whitespace(self.prefix_source)} {normalize_whitespace(self.oracle_text or '')}"
        )
        return (self.bug_id, self.run_id, source)

    def prefix_key(self) -> Tuple[str, int, str]:
        """Equality key of the prefix alone (NoException collapse)"""
        return (self.bug_id, self.run_id, normalize_whitespace(self.prefix_source))


class ExecutionOutcome(BaseModel):
    """Result of running one generated test on the buggy and fixed versions"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    record_id: str = Field(..., min_length=1)
    buggy_result: ExecutionResult
    fixed_result: ExecutionResult
    raw_trace: Optional[str] = None
    compile_error: bool = False
    buggy_failure_kind: Optional[FailureKind] = None
    fixed_failure_kind: Optional[FailureKind] = None
    fixed_trace: Optional[str] = None

    @model_validator(mode="after")
    def check_trace_present(self) -> "ExecutionOutcome":
        # compile-error outcomes never reach classification, so their results are not checked
        if (
            not self.compile_error
            and self.buggy_result == ExecutionResult.FAIL
            and not (self.raw_trace or "").strip()
        ):
            raise ValueError("raw_trace is required when buggy_result is fail")
        return self

    @property
    def fails_on_buggy(self) -> bool:
        return self.buggy_result == ExecutionResult.FAIL

    @property
    def fails_on_fixed(self) -> bool:
        return self.fixed_result == ExecutionResult.FAIL


class CorpusEntry(BaseModel):
    """A record joined with its outcome"""

    model_config = ConfigDict(frozen=True)

    record: TestRecord
    outcome: ExecutionOutcome

    @property
    def record_id(self) -> str:
        return self.record.record_id

    @property
    def bug_id(self) -> str:
        return self.record.bug_id

    @property
    def run_id(self) -> int:
        return self.record.run_id


Corpus = Tuple[CorpusEntry, ...]
