"""
Structured logging setup and stage timing
"""

import logging
import time
import uuid
from contextlib import contextmanager
from typing import Iterator, Optional

from oracle_rank.deps.exceptions import PipelineStageError

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# extra= keys rendered by the structured formatter, in this order
STRUCTURED_FIELDS = (
    "event_type",
    "correlation_id",
    "stage",
    "bug_id",
    "run_id",
    "count",
    "process_time_ms",
    "error_type",
)


class StructuredFormatter(logging.Formatter):
    """
    Appends the structured extra fields of a record as key=value pairs
    """

    def format(self, record: logging.LogRecord) -> str:
        base = super().format(record)
        fields = [
            f"{name}={getattr(record, name)}"
            for name in STRUCTURED_FIELDS
            if getattr(record, name, None) is not None
        ]
        if not fields:
            return base
        return f"{base} | {' '.join(fields)}"


def configure_logging(level: str = "INFO", fmt: str = "text") -> None:
    """
    Configure root logging for CLI runs

    Args:
        level: Log level name
        fmt: "text" for the plain format, "structured" to append extra fields
    """
    logging.basicConfig(level=level.upper(), format=LOG_FORMAT, force=True)
    if fmt == "structured":
        for handler in logging.getLogger().handlers:
            handler.setFormatter(StructuredFormatter(LOG_FORMAT))


@contextmanager
def log_stage(stage: str, correlation_id: Optional[str] = None) -> Iterator[str]:
    """
    Log start, completion and failure of a pipeline stage

    Errors raised inside the block are re-raised as PipelineStageError so the
    CLI can report which stage failed.

    Args:
        stage: Stage name (ingest, dedup, rank, ...)
        correlation_id: Id shared by all stages of one invocation

    Yields:
        The correlation id in use
    """
    correlation_id = correlation_id or str(uuid.uuid4())
    start_time = time.time()
    logger.debug(
        "Stage started",
        extra={"event_type": "stage_start", "stage": stage, "correlation_id": correlation_id},
    )
    try:
        yield correlation_id
    except PipelineStageError:
        raise
    except Exception as e:
        _log_failure(stage, correlation_id, start_time, e)
        raise PipelineStageError(stage, e) from e
    else:
        process_time = time.time() - start_time
        logger.info(
            f"Stage {stage} completed",
            extra={
                "event_type": "stage_complete",
                "stage": stage,
                "correlation_id": correlation_id,
                "process_time_ms": round(process_time * 1000, 2),
            },
        )


def _log_failure(stage: str, correlation_id: str, start_time: float, error: Exception) -> None:
    process_time = time.time() - start_time
    logger.error(
        f"Stage {stage} failed: {error}",
        extra={
            "event_type": "stage_error",
            "stage": stage,
            "correlation_id": correlation_id,
            "error_type": type(error).__name__,
            "process_time_ms": round(process_time * 1000, 2),
        },
    )
