"""
Evaluation pipeline: ingest -> dedup -> filter -> provenance -> classify ->
features -> ranking -> metrics -> reports
"""

import logging
import uuid
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, TypeVar

import numpy as np
from joblib import Parallel, delayed
from tqdm import tqdm

from oracle_rank.core.logging import log_stage
from oracle_rank.deps.exceptions import ConfigurationError, EmptyBugUniverseError
from oracle_rank.schemas.corpus import Corpus, CorpusEntry, PrefixProvenance
from oracle_rank.schemas.features import FailedTest, FeatureVector
from oracle_rank.schemas.metrics import MetricsReport, RunMetrics
from oracle_rank.schemas.pipeline import PipelineConfig
from oracle_rank.schemas.ranking import RankedList, RankingMethod
from oracle_rank.schemas.report import EvaluationReport, OverlapReport
from oracle_rank.services.corpus import CorpusService
from oracle_rank.services.feature_extractor import FeatureExtractorService, feature_extractor_service
from oracle_rank.services.metrics import MetricsService, RunRankings
from oracle_rank.services.no_exception import NoExceptionBaselineService
from oracle_rank.services.ranker import BugRanking, FailedTestRanker, format_ranked_dump
from oracle_rank.services.report_writer import (
    FEATURES_FILE,
    RANKINGS_FILE,
    REPORT_JSON,
    REPORT_TEXT,
    ReportWriterService,
)
from oracle_rank.services.stats import SignificanceService
from oracle_rank.services.trace_parser import TraceParserService

logger = logging.getLogger(__name__)

GENERATED = "generated"
NO_EXCEPTION = "no_exception"
# metrics compared between the generated tests and the NoException baseline;
# found_at_<k> is added when a ranking method is configured
BASELINE_METRICS = ("bug_found", "precision", "fpr", "tp", "fp")

ItemT = TypeVar("ItemT")
ResultT = TypeVar("ResultT")


@dataclass
class BugWorkItem:
    """Failed tests of one (bug, run) and what the pipeline derives from them"""

    bug_id: str
    run_id: int
    failed: List[FailedTest]
    vectors: List[FeatureVector] = field(default_factory=list)
    ranking: Optional[BugRanking] = None


@dataclass
class PipelineResult:
    report: EvaluationReport
    ranked_lists: List[RankedList]
    work_items: List[BugWorkItem]
    baseline_items: List[BugWorkItem] = field(default_factory=list)

    def rankings_dump(self) -> str:
        return format_ranked_dump(self.ranked_lists)

    def features_dump(self) -> str:
        parts = [
            feature_extractor_service.format_dump([t.record_id for t in item.failed], item.vectors)
            for item in self.work_items
        ]
        return "".join(parts)


class EvaluationPipeline:
    """
    Runs the evaluation stages for one PipelineConfig
    """

    def __init__(self, config: PipelineConfig):
        self.config = config
        self.correlation_id = config.correlation_id or str(uuid.uuid4())
        self.corpus_service = CorpusService()
        self.trace_parser = TraceParserService()
        self.features = FeatureExtractorService()
        self.metrics = MetricsService()
        self.baseline = NoExceptionBaselineService(trace_parser=self.trace_parser)
        self.significance = SignificanceService()
        self.writer = ReportWriterService()
        self.ranker: Optional[FailedTestRanker] = None
        if config.ranking != RankingMethod.NONE:
            self.ranker = FailedTestRanker(
                config.ranking,
                config.seeds,
                num_trees=config.num_trees,
                max_samples=config.max_samples,
            )

    def _map(self, fn: Callable[[ItemT], ResultT], items: Sequence[ItemT], desc: str) -> List[ResultT]:
        """Apply fn to every item on the thread pool; results keep input order"""
        progress = tqdm(items, desc=desc, disable=not self.config.show_progress)
        if self.config.threads <= 1:
            return [fn(item) for item in progress]
        return Parallel(n_jobs=self.config.threads, prefer="threads")(delayed(fn)(item) for item in progress)

    def _stage(self, name: str, approach: str = GENERATED):
        stage = name if approach == GENERATED else f"{approach}:{name}"
        return log_stage(stage, self.correlation_id)

    def load(self) -> Tuple[Corpus, List[str], List[int]]:
        """
        Ingest, deduplicate, filter compile errors and apply the provenance filter

        Returns:
            The filtered corpus, the bug universe and the run ids, both taken
            from the ingested corpus
        """
        with self._stage("ingest"):
            corpus = self.corpus_service.ingest(self.config.records_path, self.config.outcomes_path)
            universe = self.corpus_service.bug_universe(corpus)
            runs = self.corpus_service.run_ids(corpus)
            if not universe:
                raise EmptyBugUniverseError("the corpus contains no records")
        # Universe and runs come from the ingested corpus
        with self._stage("dedup"):
            corpus = self.corpus_service.deduplicate(corpus)
        with self._stage("filter"):
            corpus = self.corpus_service.filter_records(corpus)
        with self._stage("provenance"):
            corpus = self.corpus_service.filter_provenance(corpus, self.config.provenance)
            fixed = sum(1 for e in corpus if e.record.prefix_provenance == PrefixProvenance.FIXED)
            if fixed:
                logger.warning(
                    f"{fixed} test prefixes were generated from fixed program versions; "
                    "prefixes built from bug-fixed versions can significantly inflate the metrics",
                    extra={"event_type": "provenance_warning", "count": fixed},
                )
        return corpus, universe, runs

    def _check_classifiable(self, corpus: Corpus) -> None:
        """Raises UnfilteredOutcomeError when a compile-error entry slipped through"""
        for entry in corpus:
            self.metrics.classify(entry.outcome)

    def build_work_items(self, corpus: Corpus, approach: str = GENERATED) -> List[BugWorkItem]:
        """Parse the traces of failed-on-buggy entries and group them by (bug, run)"""
        with self._stage("classify", approach):
            self._check_classifiable(corpus)
            # Only failed-on-buggy tests are ranked
            items = []
            for (bug_id, run_id), entries in self.corpus_service.group_by_bug_run(corpus).items():
                failed = [
                    FailedTest(record=e.record, trace=self.trace_parser.parse(e.outcome.raw_trace))
                    for e in entries
                    if e.outcome.fails_on_buggy
                ]
                if failed:
                    items.append(BugWorkItem(bug_id=bug_id, run_id=run_id, failed=failed))
        return items

    def extract(self, items: List[BugWorkItem], approach: str = GENERATED) -> None:
        with self._stage("features", approach):
            vectors = self._map(lambda item: self.features.extract(item.failed), items, "features")
            for item, item_vectors in zip(items, vectors):
                item.vectors = item_vectors

    def rank(self, items: List[BugWorkItem], approach: str = GENERATED) -> List[RankedList]:
        if self.ranker is None:
            return []
        with self._stage("rank", approach):
            rankings = self._map(lambda item: self.ranker.rank(item.failed, item.vectors), items, "ranking")
            for item, ranking in zip(items, rankings):
                item.ranking = ranking
        return [item.ranking.consensus for item in items]

    def rank_baseline(self, corpus: Corpus) -> Tuple[Corpus, List[BugWorkItem]]:
        """
        Reclassify the corpus under NoException and rank its failed prefixes

        Returns:
            The collapsed baseline corpus and its work items, ranked with the
            same method and seeds as the generated tests
        """
        with self._stage("reclassify", NO_EXCEPTION):
            baseline = self.baseline.reclassify(corpus)
        items = self.build_work_items(baseline, NO_EXCEPTION)
        if self.ranker is not None:
            self.extract(items, NO_EXCEPTION)
            self.rank(items, NO_EXCEPTION)
        return baseline, items

    def _run_rankings(self, items: List[BugWorkItem], run_id: int) -> RunRankings:
        if self.ranker is None:
            return RunRankings()
        # Lists of this run only, keyed by bug
        run_items = [item for item in items if item.run_id == run_id]
        consensus = {item.bug_id: item.ranking.consensus for item in run_items}
        per_seed = [
            {item.bug_id: item.ranking.per_seed[i] for item in run_items} for i in range(len(self.config.seeds))
        ]
        return RunRankings(
            consensus=consensus,
            per_seed=per_seed,
            average_seeds=self.config.ranking == RankingMethod.RANDOM,
        )

    def _approach_report(
        self,
        name: str,
        corpus: Corpus,
        universe: List[str],
        runs: List[int],
        items: List[BugWorkItem],
    ) -> MetricsReport:
        # Split the corpus per run; runs without entries stay empty
        by_run: Dict[int, List[CorpusEntry]] = {run: [] for run in runs}
        for entry in corpus:
            by_run[entry.run_id].append(entry)
        run_reports: List[RunMetrics] = [
            self.metrics.run_metrics(
                run, by_run[run], universe, self._run_rankings(items, run), self.config.k_values
            )
            for run in runs
        ]
        return MetricsReport(
            approach=name,
            ranking=self.config.ranking.value,
            bug_count=len(universe),
            runs=run_reports,
            aggregate=self.metrics.aggregate_runs(run_reports),
            by_oracle_kind=self.metrics.aggregate_by_oracle_kind(run_reports),
        )

    def _overlap(self, generated: Corpus, baseline: Corpus, runs: List[int]) -> OverlapReport:
        overlaps = []
        for run in runs:
            found_generated = self.metrics.bugs_with_tp(e for e in generated if e.run_id == run)
            found_baseline = self.metrics.bugs_with_tp(e for e in baseline if e.run_id == run)
            overlaps.append(self.metrics.bug_overlap(found_generated, found_baseline))
        return OverlapReport(
            runs=overlaps,
            mean_both=float(np.mean([o.both for o in overlaps])),
            mean_only_first=float(np.mean([o.only_first for o in overlaps])),
            mean_only_second=float(np.mean([o.only_second for o in overlaps])),
        )

    def compared_metrics(self) -> List[str]:
        """Metrics paired between the generated tests and the NoException baseline"""
        names = list(BASELINE_METRICS)
        if self.ranker is not None:
            names.extend(f"found_at_{k}" for k in self.config.k_values)
        return names

    def evaluate(self) -> PipelineResult:
        """
        Run every stage and assemble the evaluation report (nothing is written)

        Returns:
            PipelineResult with the report, the consensus lists and the work items
        """
        # Generated tests: load, classify, extract and rank
        corpus, universe, runs = self.load()
        items = self.build_work_items(corpus)
        self.extract(items)
        ranked_lists = self.rank(items)

        # NoException baseline over the same corpus
        baseline: Optional[Corpus] = None
        baseline_items: List[BugWorkItem] = []
        if self.config.baseline_noexception:
            baseline, baseline_items = self.rank_baseline(corpus)

        # Metrics per approach plus the paired comparison
        with self._stage("metrics"):
            approaches = {GENERATED: self._approach_report(GENERATED, corpus, universe, runs, items)}
            comparison = []
            overlap = None
            if baseline is not None:
                approaches[NO_EXCEPTION] = self._approach_report(
                    NO_EXCEPTION, baseline, universe, runs, baseline_items
                )
                comparison = [
                    self.significance.compare(
                        name,
                        approaches[GENERATED].metric_values(name),
                        approaches[NO_EXCEPTION].metric_values(name),
                    )
                    for name in self.compared_metrics()
                ]
                overlap = self._overlap(corpus, baseline, runs)

        report = EvaluationReport(
            config=self.config.describe(),
            bug_count=len(universe),
            approaches=approaches,
            comparison=comparison,
            overlap=overlap,
        )
        return PipelineResult(
            report=report, ranked_lists=ranked_lists, work_items=items, baseline_items=baseline_items
        )

    def run(self) -> PipelineResult:
        """Evaluate and write report.json, report.txt, rankings.tsv and features.tsv"""
        result = self.evaluate()
        with self._stage("report"):
            self.writer.write_files(
                self.config.out_dir,
                {
                    REPORT_JSON: result.report.model_dump_json(indent=2) + "\n",
                    REPORT_TEXT: self.writer.render_report(result.report),
                    RANKINGS_FILE: result.rankings_dump(),
                    FEATURES_FILE: result.features_dump(),
                },
            )
        return result

    def run_rank_only(self) -> List[RankedList]:
        """Rank the failed tests and write rankings.tsv without computing metrics"""
        if self.ranker is None:
            raise ConfigurationError("ranking method required")
        corpus, _, _ = self.load()
        items = self.build_work_items(corpus)
        self.extract(items)
        ranked_lists = self.rank(items)
        with self._stage("report"):
            self.writer.write_files(self.config.out_dir, {RANKINGS_FILE: format_ranked_dump(ranked_lists)})
        return ranked_lists
