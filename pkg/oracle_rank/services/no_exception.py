"""
NoException baseline: a prefix fails iff executing it raises an exception
"""

import logging
from typing import List, Optional

from oracle_rank.deps.exceptions import TraceParseError
from oracle_rank.schemas.corpus import (
    Corpus,
    CorpusEntry,
    ExecutionOutcome,
    ExecutionResult,
    FailureKind,
    OracleKind,
)
from oracle_rank.services.trace_parser import TraceParserService

logger = logging.getLogger(__name__)

# failure kind assumed when neither an explicit kind nor a parsable trace is available
_KIND_BY_ORACLE = {
    OracleKind.ASSERTION: FailureKind.ASSERTION,
    OracleKind.EXPECT_NO_EXCEPTION: FailureKind.EXCEPTION,
    OracleKind.EXPECT_EXCEPTION: FailureKind.ASSERTION,
}


class NoExceptionBaselineService:
    """
    Reclassifies a corpus as if every prefix only checked that no exception is thrown
    """

    def __init__(self, trace_parser: Optional[TraceParserService] = None):
        self.trace_parser = trace_parser or TraceParserService()

    def failure_kind(self, entry: CorpusEntry, on_fixed: bool = False) -> FailureKind:
        """
        What made the entry fail on one version

        An explicit failure kind in the outcome wins, then the kind inferred from
        the version's stack trace, then a default derived from the oracle kind.
        """
        outcome = entry.outcome
        failed = outcome.fails_on_fixed if on_fixed else outcome.fails_on_buggy
        if not failed:
            return FailureKind.NONE

        # Explicit kind, then trace, then oracle default
        explicit = outcome.fixed_failure_kind if on_fixed else outcome.buggy_failure_kind
        if explicit is not None and explicit != FailureKind.NONE:
            return explicit

        raw = outcome.fixed_trace if on_fixed else outcome.raw_trace
        if raw:
            try:
                return self.trace_parser.classify_failure_kind(self.trace_parser.parse(raw))
            except TraceParseError:
                logger.debug(f"Unparsable trace for {entry.record_id}, falling back to the oracle kind")
        return _KIND_BY_ORACLE[entry.record.oracle_kind]

    def collapse(self, group: List[CorpusEntry]) -> CorpusEntry:
        """One ExpectNoException entry for records sharing a prefix"""
        buggy_kinds = [self.failure_kind(e) for e in group]
        fixed_kinds = [self.failure_kind(e, on_fixed=True) for e in group]
        buggy_positive = FailureKind.EXCEPTION in buggy_kinds
        fixed_positive = FailureKind.EXCEPTION in fixed_kinds

        # the first exception failure supplies the record and the trace
        representative = group[0]
        if buggy_positive:
            representative = group[buggy_kinds.index(FailureKind.EXCEPTION)]
        fixed_trace: Optional[str] = None
        if fixed_positive:
            fixed_trace = group[fixed_kinds.index(FailureKind.EXCEPTION)].outcome.fixed_trace

        record = representative.record.model_copy(
            update={"oracle_kind": OracleKind.EXPECT_NO_EXCEPTION, "oracle_text": None}
        )
        outcome = ExecutionOutcome(
            record_id=record.record_id,
            buggy_result=ExecutionResult.FAIL if buggy_positive else ExecutionResult.PASS,
            fixed_result=ExecutionResult.FAIL if fixed_positive else ExecutionResult.PASS,
            raw_trace=representative.outcome.raw_trace if buggy_positive else None,
            compile_error=False,
            buggy_failure_kind=FailureKind.EXCEPTION if buggy_positive else FailureKind.NONE,
            fixed_failure_kind=FailureKind.EXCEPTION if fixed_positive else FailureKind.NONE,
            fixed_trace=fixed_trace,
        )
        return CorpusEntry(record=record, outcome=outcome)

    def reclassify(self, corpus: Corpus) -> Corpus:
        """
        Reclassify a filtered corpus under the NoException baseline

        Records collapse to unique whitespace-normalised prefixes within each
        (bug_id, run_id); oracle kind and oracle text are ignored. A collapsed
        prefix is positive on a version iff one of its records failed there with
        an exception-kind failure.

        Args:
            corpus: Deduplicated corpus without compile-error entries

        Returns:
            One ExpectNoException entry per unique prefix, in first-seen order
        """
        # Group by (bug, run, normalised prefix)
        groups = {}
        for entry in corpus:
            groups.setdefault(entry.record.prefix_key(), []).append(entry)
        collapsed = tuple(self.collapse(group) for group in groups.values())
        logger.info(
            f"NoException baseline: {len(corpus)} records collapsed to {len(collapsed)} prefixes",
            extra={"event_type": "no_exception", "count": len(collapsed)},
        )
        return collapsed


no_exception_service = NoExceptionBaselineService()


def no_exception_baseline(corpus: Corpus) -> Corpus:
    return no_exception_service.reclassify(corpus)
