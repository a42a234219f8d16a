"""
Custom exceptions for the evaluation toolchain

Every exception carries an error code (printed by the CLI) and the process
exit code it maps to: 1 for usage errors, 2 for data errors.
"""

from typing import Iterable, List, Optional


class OracleRankError(Exception):
    """Base exception for evaluation errors"""

    error_code = "DATA_ERROR"
    exit_code = 2

    def __init__(self, message: str):
        self.message = message
        super().__init__(self.message)


class ConfigurationError(OracleRankError):
    """Raised when the invocation configuration is invalid"""

    error_code = "USAGE_ERROR"
    exit_code = 1


class CorpusFormatError(OracleRankError):
    """Raised when a line of a corpus file cannot be parsed"""

    error_code = "MALFORMED_LINE"

    def __init__(self, path: str, line_number: int, detail: str):
        self.path = path
        self.line_number = line_number
        self.detail = detail
        super().__init__(f"{path}:{line_number}: {detail}")


class DuplicateRecordError(OracleRankError):
    """Raised when a record_id occurs more than once in a corpus file"""

    error_code = "DUPLICATE_RECORD"

    def __init__(self, path: str, record_ids: Iterable[str]):
        self.path = path
        self.record_ids: List[str] = list(record_ids)
        super().__init__(f"{path}: duplicate record_id(s): {', '.join(self.record_ids)}")


class DanglingRecordError(OracleRankError):
    """Raised when records and outcomes do not join one-to-one"""

    error_code = "DANGLING_RECORD"

    def __init__(self, missing_records: Iterable[str], missing_outcomes: Iterable[str]):
        self.missing_records: List[str] = list(missing_records)
        self.missing_outcomes: List[str] = list(missing_outcomes)
        parts = []
        if self.missing_records:
            parts.append(f"outcomes without a record: {', '.join(self.missing_records)}")
        if self.missing_outcomes:
            parts.append(f"records without an outcome: {', '.join(self.missing_outcomes)}")
        super().__init__("; ".join(parts))


class TraceParseError(OracleRankError):
    """Raised when a stack trace does not have the expected shape"""

    error_code = "TRACE_PARSE_ERROR"

    def __init__(self, raw: str, reason: str):
        self.raw = raw
        self.reason = reason
        super().__init__(f"{reason}: {raw!r}")


class MixedBugSetError(OracleRankError):
    """Raised when a per-bug operation receives tests from several bugs or runs"""

    error_code = "MIXED_BUG_SET"


class EmptyFitSetError(OracleRankError):
    """Raised when an Isolation Forest is fitted on no data"""

    error_code = "EMPTY_FIT_SET"

    def __init__(self, message: str = "cannot fit an isolation forest on an empty set"):
        super().__init__(message)


class UnfilteredOutcomeError(OracleRankError):
    """Raised when a compile-error outcome reaches classification"""

    error_code = "UNFILTERED_OUTCOME"


class EmptyBugUniverseError(OracleRankError):
    """Raised when Found@K is requested over zero bugs"""

    error_code = "EMPTY_BUG_UNIVERSE"

    def __init__(self, message: str = "Found@K needs at least one bug"):
        super().__init__(message)


class SampleMismatchError(OracleRankError):
    """Raised when paired or repeated inputs have incompatible sizes"""

    error_code = "SAMPLE_MISMATCH"


class ReportFormatError(OracleRankError):
    """Raised when a report file cannot be used for comparison"""

    error_code = "REPORT_FORMAT_ERROR"


class PipelineStageError(OracleRankError):
    """Wraps the failure of a pipeline stage, keeping the cause's codes"""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        default_code = "IO_ERROR" if isinstance(cause, OSError) else "DATA_ERROR"
        self.error_code = getattr(cause, "error_code", default_code)
        self.exit_code = getattr(cause, "exit_code", 2)
        detail: Optional[str] = getattr(cause, "message", None) or str(cause)
        super().__init__(f"stage '{stage}' failed: {detail}")
