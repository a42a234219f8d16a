"""
Paired comparison of two evaluation reports (stats-compare)
"""

import logging
from pathlib import Path
from typing import List, Optional, Sequence, Union

from pydantic import ValidationError

from oracle_rank.core.config import settings
from oracle_rank.deps.exceptions import ReportFormatError
from oracle_rank.schemas.metrics import MetricsReport
from oracle_rank.schemas.report import ComparisonReport, EvaluationReport
from oracle_rank.services.report_writer import COMPARISON_JSON, COMPARISON_TEXT, ReportWriterService
from oracle_rank.services.stats import SignificanceService

logger = logging.getLogger(__name__)

RUN_LEVEL = "run"
SEED_LEVEL = "seed"
FOUND_AT_PREFIX = "found_at_"


class ReportComparisonService:
    """
    Loads two report.json files and compares one approach metric by metric
    """

    def __init__(self):
        self.writer = ReportWriterService()

    def load(self, path: Union[str, Path]) -> EvaluationReport:
        """
        Raises:
            ReportFormatError: unreadable file or not an evaluation report
        """
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise ReportFormatError(f"{path}: cannot read report: {e}") from e
        try:
            return EvaluationReport.model_validate_json(text)
        except ValidationError as e:
            raise ReportFormatError(
                f"{path}: not an evaluation report ({e.error_count()} validation errors)"
            ) from e

    def compare(
        self,
        path_a: Union[str, Path],
        path_b: Union[str, Path],
        metrics: Optional[Sequence[str]] = None,
        level: str = RUN_LEVEL,
        approach: str = "generated",
        alpha: Optional[float] = None,
    ) -> ComparisonReport:
        """
        Compare one approach of two reports metric by metric

        Args:
            path_a: First report.json (A)
            path_b: Second report.json (B)
            metrics: Metric names; defaults to every metric both reports share
            level: "run" pairs per-run values, "seed" pairs per-seed Found@K values
            approach: Approach to take from both reports
            alpha: Significance level

        Returns:
            ComparisonReport with one ComparisonResult per metric
        """
        # Load both reports and pick the approach
        alpha = settings.significance_level if alpha is None else alpha
        report_a = self._approach(self.load(path_a), approach, path_a)
        report_b = self._approach(self.load(path_b), approach, path_b)

        # Default to the metrics both reports carry
        if not metrics:
            shared = set(report_b.metric_names())
            metrics = [m for m in report_a.metric_names() if m in shared]
            if level == SEED_LEVEL:
                metrics = [m for m in metrics if m.startswith(FOUND_AT_PREFIX)]

        # One paired test per metric
        significance = SignificanceService(alpha=alpha)
        results = [
            significance.compare(
                metric,
                self._values(report_a, metric, level, path_a),
                self._values(report_b, metric, level, path_b),
            )
            for metric in metrics
        ]
        return ComparisonReport(
            level=level,
            approach=approach,
            report_a=Path(path_a).name,
            report_b=Path(path_b).name,
            alpha=alpha,
            results=results,
        )

    def write(self, report: ComparisonReport, out_dir: Union[str, Path]) -> None:
        self.writer.write_files(
            out_dir,
            {
                COMPARISON_JSON: report.model_dump_json(indent=2) + "\n",
                COMPARISON_TEXT: self.writer.render_comparison(report),
            },
        )

    @staticmethod
    def _approach(report: EvaluationReport, name: str, path: Union[str, Path]) -> MetricsReport:
        if name not in report.approaches:
            raise ReportFormatError(f"{path}: no approach named {name!r} (have {', '.join(report.approaches)})")
        return report.approaches[name]

    @staticmethod
    def _values(report: MetricsReport, metric: str, level: str, path: Union[str, Path]) -> List[float]:
        try:
            if level == SEED_LEVEL:
                if not metric.startswith(FOUND_AT_PREFIX):
                    raise ReportFormatError(f"seed-level comparison only supports found_at_<k>, got {metric!r}")
                values = report.seed_values(int(metric[len(FOUND_AT_PREFIX):]))
            else:
                values = report.metric_values(metric)
        except (KeyError, ValueError) as e:
            raise ReportFormatError(f"{path}: metric {metric!r} is not available") from e
        if not values:
            raise ReportFormatError(f"{path}: metric {metric!r} has no values")
        return values


report_comparison_service = ReportComparisonService()
