"""
Report rendering and atomic report-file output
"""

import logging
import os
import shutil
import tempfile
from pathlib import Path
from typing import Dict, List, Sequence, Union

from oracle_rank.schemas.metrics import AggregateMetrics, MetricsReport
from oracle_rank.schemas.report import ComparisonReport, EvaluationReport
from oracle_rank.schemas.stats import ComparisonResult

logger = logging.getLogger(__name__)

REPORT_JSON = "report.json"
REPORT_TEXT = "report.txt"
RANKINGS_FILE = "rankings.tsv"
FEATURES_FILE = "features.tsv"
COMPARISON_JSON = "comparison.json"
COMPARISON_TEXT = "comparison.txt"


def _ratio(value: float) -> str:
    return f"{value:.4f}"


def _count(value: float) -> str:
    return f"{value:.2f}"


class ReportWriterService:
    """
    Renders evaluation and comparison reports as aligned text and writes report files
    """

    @staticmethod
    def format_table(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> List[str]:
        """Left-align the first column and right-align the rest"""
        widths = [len(h) for h in headers]
        for row in rows:
            widths = [max(w, len(cell)) for w, cell in zip(widths, row)]

        def render(cells: Sequence[str]) -> str:
            parts = [cells[0].ljust(widths[0])]
            parts.extend(cell.rjust(width) for cell, width in zip(cells[1:], widths[1:]))
            return "  ".join(parts).rstrip()

        lines = [render(headers), render(["-" * w for w in widths])]
        lines.extend(render(row) for row in rows)
        return lines

    def render_report(self, report: EvaluationReport) -> str:
        """Aligned-column text version of report.json"""
        config = report.config
        lines = [
            "Evaluation report",
            f"bugs: {report.bug_count}  ranking: {config.get('ranking')}  provenance: {config.get('provenance')}"
            f"  seeds: {','.join(str(s) for s in config.get('seeds', []))}",
            "",
        ]
        # One section per approach
        for approach in report.approaches.values():
            lines.extend(self._approach_lines(approach))
            lines.append("")

        if report.comparison:
            names = list(report.approaches)
            lines.append(f"== comparison: A = {names[0]}, B = {names[-1]} (per-run values) ==")
            lines.extend(self._comparison_lines(report.comparison))
            lines.append("")

        # Overlap is present only with the baseline
        if report.overlap is not None:
            lines.append("== bug overlap (mean over runs) ==")
            lines.extend(
                self.format_table(
                    ["found by", "bugs"],
                    [
                        ["both", _count(report.overlap.mean_both)],
                        ["generated only", _count(report.overlap.mean_only_first)],
                        ["NoException only", _count(report.overlap.mean_only_second)],
                    ],
                )
            )
            lines.append("")

        lines.append("conventions:")
        lines.extend(f"  {name}: {text}" for name, text in report.conventions.items())
        return "\n".join(lines) + "\n"

    def render_comparison(self, report: ComparisonReport) -> str:
        lines = [
            f"Comparison of {report.approach} ({report.level} level)",
            f"A: {report.report_a}",
            f"B: {report.report_b}",
            f"alpha: {report.alpha}",
            "",
            *self._comparison_lines(report.results),
        ]
        return "\n".join(lines) + "\n"

    def write_files(self, out_dir: Union[str, Path], files: Dict[str, str]) -> List[Path]:
        """
        Write report files so that either all of them appear or none does

        Files are staged in a temporary directory next to ``out_dir`` and moved
        into place once every file is written; the staging directory is always
        removed.

        Args:
            out_dir: Target directory, created when missing
            files: File name -> UTF-8 content

        Returns:
            Paths of the written files
        """
        out_path = Path(out_dir)
        out_path.mkdir(parents=True, exist_ok=True)
        staging = Path(tempfile.mkdtemp(prefix=".oracle-rank-", dir=out_path.parent))
        written: List[Path] = []
        try:
            # Stage every file before touching the target directory
            for name, content in files.items():
                with open(staging / name, "w", encoding="utf-8", newline="\n") as handle:
                    handle.write(content)
            for name in files:
                target = out_path / name
                os.replace(staging / name, target)
                written.append(target)
        except OSError:
            for path in written:
                path.unlink(missing_ok=True)
            raise
        finally:
            shutil.rmtree(staging, ignore_errors=True)

        logger.info(
            f"Wrote {len(written)} report files to {out_path}",
            extra={"event_type": "report", "count": len(written)},
        )
        return written

    def _approach_lines(self, report: MetricsReport) -> List[str]:
        k_values = sorted(report.aggregate.found_at_k)
        headers = ["run", "TP", "FP", "TN", "FN", "BugFound", "FPR", "Precision"]
        headers += [f"F@{k}" for k in k_values] + [f"F@{k}%" for k in k_values]

        # One row per run, then the mean row
        rows = []
        for run in report.runs:
            c = run.confusion
            row = [str(run.run_id), str(c.tp), str(c.fp), str(c.tn), str(c.fn), str(run.bug_found)]
            row += [_ratio(run.fpr), _ratio(run.precision)]
            row += [_count(run.found_at_k[k].count) for k in k_values]
            row += [_ratio(run.found_at_k[k].fraction) for k in k_values]
            rows.append(row)
        rows.append(["mean", *self._aggregate_cells(report.aggregate, k_values)])

        lines = [f"== {report.approach} (ranking: {report.ranking}) ==", *self.format_table(headers, rows)]

        # Per-seed layer, ranked approaches only
        seed_mean = report.aggregate.found_at_k_seed_mean
        if seed_mean:
            lines.append("")
            seed_headers = ["seed layer"] + [f"F@{k}" for k in sorted(seed_mean)]
            seed_row = ["mean over seeds"] + [_count(seed_mean[k]) for k in sorted(seed_mean)]
            lines.extend(self.format_table(seed_headers, [seed_row]))

        if report.by_oracle_kind:
            lines.append("")
            lines.append("-- by oracle kind (mean over runs) --")
            kind_rows = [
                [kind, *self._aggregate_cells(aggregate, k_values)] for kind, aggregate in report.by_oracle_kind.items()
            ]
            lines.extend(self.format_table(["oracle kind", *headers[1:]], kind_rows))
        return lines

    @staticmethod
    def _aggregate_cells(aggregate: AggregateMetrics, k_values: Sequence[int]) -> List[str]:
        cells = [_count(aggregate.tp), _count(aggregate.fp), _count(aggregate.tn), _count(aggregate.fn)]
        cells += [_count(aggregate.bug_found), _ratio(aggregate.fpr), _ratio(aggregate.precision)]
        cells += [_count(aggregate.found_at_k[k].count) if k in aggregate.found_at_k else "-" for k in k_values]
        cells += [_ratio(aggregate.found_at_k[k].fraction) if k in aggregate.found_at_k else "-" for k in k_values]
        return cells

    def _comparison_lines(self, results: Sequence[ComparisonResult]) -> List[str]:
        headers = ["metric", "mean A", "mean B", "W", "p", "method", "delta", "magnitude", "significant"]
        rows = [
            [
                r.metric,
                _ratio(r.mean_a),
                _ratio(r.mean_b),
                _count(r.statistic),
                _ratio(r.p_value),
                r.method,
                _ratio(r.delta),
                r.magnitude.value,
                "yes" if r.significant else "no",
            ]
            for r in results
        ]
        return self.format_table(headers, rows)


report_writer_service = ReportWriterService()
