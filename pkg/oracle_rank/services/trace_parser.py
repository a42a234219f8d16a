"""
JVM-style stack trace parsing
"""

import logging
from typing import List, Optional

from oracle_rank.deps.exceptions import TraceParseError
from oracle_rank.schemas.corpus import FailureKind
from oracle_rank.schemas.trace import ParsedTrace

logger = logging.getLogger(__name__)

CAUSED_BY = "Caused by:"
FRAME_PREFIX = "at "

# exception names that mean an assertion, not the code under test, failed
ASSERTION_FAILURE_NAMES = frozenset({"AssertionFailedError", "AssertionError", "ComparisonFailure"})


class TraceParserService:
    """
    Splits failed-test stack traces into test name, exception line and frames
    """

    def parse(self, raw: str) -> ParsedTrace:
        """
        Parse a failed test's stack trace

        The first line names the test, the second is the exception line
        (``qualified.Name: message``). Only the outermost exception fills the
        exception fields; ``Caused by:`` lines are collected in ``causes`` and
        the nested sections after them are not parsed further.

        Args:
            raw: Trace text as reported by the test runner

        Returns:
            ParsedTrace

        Raises:
            TraceParseError: fewer than two lines, or an empty exception line
        """
        # Drop trailing blank lines
        lines = (raw or "").splitlines()
        while lines and not lines[-1].strip():
            lines.pop()
        if len(lines) < 2:
            raise TraceParseError(raw or "", "stack trace needs at least two lines")

        exception_line = lines[1].strip()
        if not exception_line:
            raise TraceParseError(raw, "exception line is empty")

        # split at the first ": " only; messages may contain more
        message: Optional[str] = None
        if ": " in exception_line:
            qualified_name, message = exception_line.split(": ", 1)
        else:
            qualified_name = exception_line.rstrip(":")
        qualified_name = qualified_name.strip()
        if not qualified_name:
            raise TraceParseError(raw, "exception line has no exception name")

        # Frames and causes follow the exception line
        frames, causes, other_lines = self._split_body(lines[2:])
        return ParsedTrace(
            test_qualified_name=lines[0].strip(),
            exception_qualified_name=qualified_name,
            exception_simple_name=qualified_name.rsplit(".", 1)[-1],
            message=message,
            frames=frames,
            causes=causes,
            other_lines=other_lines,
        )

    def classify_failure_kind(self, trace: ParsedTrace) -> FailureKind:
        """Assertion for assertion-failure exceptions, exception for anything else"""
        if trace.exception_simple_name in ASSERTION_FAILURE_NAMES:
            return FailureKind.ASSERTION
        return FailureKind.EXCEPTION

    def _split_body(self, body: List[str]):
        frames: List[str] = []
        causes: List[str] = []
        other_lines: List[str] = []
        in_cause = False
        for line in body:
            stripped = line.strip()
            if stripped.startswith(CAUSED_BY):
                in_cause = True
                causes.append(stripped)
            elif in_cause:
                # nested cause sections are skipped
                continue
            elif stripped.startswith(FRAME_PREFIX):
                frames.append(stripped)
            elif stripped:
                other_lines.append(line)
        return frames, causes, other_lines


trace_parser_service = TraceParserService()


def parse_trace(raw: str) -> ParsedTrace:
    return trace_parser_service.parse(raw)
