"""
Ranking features for the failed tests of one bug
"""

import logging
from collections import Counter
from typing import List, Optional, Sequence

import numpy as np

from oracle_rank.deps.exceptions import MixedBugSetError
from oracle_rank.deps.utils import normalized_lines
from oracle_rank.schemas.corpus import OracleKind
from oracle_rank.schemas.features import FEATURE_NAMES, FailedTest, FeatureVector
from oracle_rank.services.source_scanner import PrefixScannerService
from oracle_rank.services.text_similarity import TextSimilarityService

logger = logging.getLogger(__name__)

# assertion failures always count as expected trace exceptions
EXPECTED_EXCEPTION_NAMES = frozenset({"AssertionFailedError", "AssertionError"})


class FeatureExtractorService:
    """
    Computes the eleven ranking features of a bug's failed tests
    """

    def __init__(
        self,
        scanner: Optional[PrefixScannerService] = None,
        similarity: Optional[TextSimilarityService] = None,
    ):
        self.scanner = scanner or PrefixScannerService()
        self.similarity = similarity or TextSimilarityService()

    def extract(self, bug_failed_set: Sequence[FailedTest]) -> List[FeatureVector]:
        """
        Compute the eleven features for every failed test of one (bug, run)

        Every "number of test cases that ..." count includes the test itself.
        Messages compare equal only when both are present.

        Args:
            bug_failed_set: Failed-on-buggy tests of a single bug and run

        Returns:
            Feature vectors aligned with the input

        Raises:
            MixedBugSetError: tests from more than one bug or run
        """
        # Validate input
        tests = list(bug_failed_set)
        if not tests:
            return []
        self._check_single_bug(tests)

        # code lines and how many tests of the set contain each of them
        lines_per_test = [normalized_lines(t.record.full_source) for t in tests]
        line_test_count: Counter = Counter()
        for lines in lines_per_test:
            line_test_count.update(set(lines))

        # set-wide counts the per-test features look up
        focal_counts = Counter(t.record.focal_method_name for t in tests)
        name_counts = Counter(t.trace.exception_simple_name for t in tests)
        message_counts = Counter(t.trace.message for t in tests if t.trace.message is not None)

        # Unexpected-exception counts skip assertion failures and documented exceptions
        expected = [self.is_expected_exception(t) for t in tests]
        unexpected_name_counts = Counter(
            t.trace.exception_simple_name for t, exp in zip(tests, expected) if not exp
        )
        unexpected_focal_counts = Counter(
            (t.trace.exception_simple_name, t.record.focal_method_name)
            for t, exp in zip(tests, expected)
            if not exp
        )

        # One vector per test, in input order
        vectors = []
        for test, lines, exp in zip(tests, lines_per_test, expected):
            record, trace = test.record, test.trace
            name = trace.exception_simple_name
            vectors.append(
                FeatureVector(
                    focal_method_name_count=focal_counts[record.focal_method_name],
                    test_distinct_code_line=sum(1 for line in lines if line_test_count[line] == 1),
                    is_exception=int(record.oracle_kind == OracleKind.EXPECT_EXCEPTION),
                    is_no_exception=int(record.oracle_kind == OracleKind.EXPECT_NO_EXCEPTION),
                    test_prefix_exception=int(self.scanner.has_catch(record.prefix_source)),
                    trace_exception_count=name_counts[name],
                    trace_exception_msg_count=(
                        message_counts[trace.message] if trace.message is not None else 1
                    ),
                    is_exp_trace_exception=int(exp),
                    unexp_trace_e_count=0 if exp else unexpected_name_counts[name],
                    focal_unexp_trace_e_count=(
                        0 if exp else unexpected_focal_counts[(name, record.focal_method_name)]
                    ),
                    test_doc_sim=self.similarity.cosine(record.full_source, record.focal_docstring),
                )
            )
        return vectors

    def is_expected_exception(self, test: FailedTest) -> bool:
        """Assertion failure, or an exception named in the focal method or its docstring"""
        name = test.trace.exception_simple_name
        if name in EXPECTED_EXCEPTION_NAMES:
            return True
        return name in test.record.focal_method_source or name in test.record.focal_docstring

    def to_matrix(self, vectors: Sequence[FeatureVector]) -> np.ndarray:
        """Stack feature vectors into an n x 11 float matrix"""
        if not vectors:
            return np.empty((0, len(FEATURE_NAMES)), dtype=float)
        return np.vstack([v.to_array() for v in vectors])

    def format_dump(self, record_ids: Sequence[str], vectors: Sequence[FeatureVector]) -> str:
        """
        Render record_id followed by the eleven feature values, tab-separated, one test per line
        """
        lines = []
        for record_id, vector in zip(record_ids, vectors):
            values = [self._format_value(getattr(vector, name)) for name in FEATURE_NAMES]
            lines.append("\t".join([record_id, *values]))
        return "".join(line + "\n" for line in lines)

    @staticmethod
    def _check_single_bug(tests: Sequence[FailedTest]) -> None:
        keys = {(t.record.bug_id, t.record.run_id) for t in tests}
        if len(keys) > 1:
            raise MixedBugSetError(f"feature extraction needs one (bug_id, run_id), got {sorted(keys)}")

    @staticmethod
    def _format_value(value) -> str:
        if isinstance(value, float):
            return f"{value:.6f}"
        return str(value)


feature_extractor_service = FeatureExtractorService()


def extract_features(bug_failed_set: Sequence[FailedTest]) -> List[FeatureVector]:
    return feature_extractor_service.extract(bug_failed_set)
