"""
Outcome classification and bug-finding metrics
"""

import logging
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set

import numpy as np

from oracle_rank.deps.exceptions import EmptyBugUniverseError, UnfilteredOutcomeError
from oracle_rank.schemas.corpus import CorpusEntry, ExecutionOutcome, OracleKind, OutcomeClass
from oracle_rank.schemas.metrics import (
    AggregateMetrics,
    BugOverlap,
    BugRankOutcome,
    ConfusionCounts,
    FoundAtK,
    KindMetrics,
    RunMetrics,
)
from oracle_rank.schemas.ranking import RankedList

logger = logging.getLogger(__name__)

# bug_id -> ranked list of that bug in one run
RankedByBug = Mapping[str, RankedList]


def _restrict(ranked_by_bug: RankedByBug, record_ids: Set[str]) -> Dict[str, RankedList]:
    return {bug_id: ranked.restricted_to(record_ids) for bug_id, ranked in ranked_by_bug.items()}


class RunRankings:
    """
    Ranked lists of one run

    ``consensus`` is None for approaches without a ranking step. When
    ``average_seeds`` is set, the reported Found@K is the mean of the
    per-seed values instead of the consensus value.
    """

    def __init__(
        self,
        consensus: Optional[RankedByBug] = None,
        per_seed: Optional[Sequence[RankedByBug]] = None,
        average_seeds: bool = False,
    ):
        self.consensus = consensus
        self.per_seed = list(per_seed or [])
        self.average_seeds = average_seeds

    @property
    def ranked(self) -> bool:
        return self.consensus is not None

    def restricted_to(self, record_ids: Set[str]) -> "RunRankings":
        return RunRankings(
            consensus=_restrict(self.consensus, record_ids) if self.consensus is not None else None,
            per_seed=[_restrict(lists, record_ids) for lists in self.per_seed],
            average_seeds=self.average_seeds,
        )


class MetricsService:
    """
    Classifies outcomes and computes per-run, per-kind and aggregated metrics
    """

    def classify(self, outcome: ExecutionOutcome) -> OutcomeClass:
        """
        Positive = fails on buggy, True = passes on fixed

        Raises:
            UnfilteredOutcomeError: for compile-error outcomes
        """
        if outcome.compile_error:
            raise UnfilteredOutcomeError(
                f"record {outcome.record_id} has a compile error and must be filtered first"
            )
        if outcome.fails_on_buggy:
            return OutcomeClass.FP if outcome.fails_on_fixed else OutcomeClass.TP
        return OutcomeClass.FN if outcome.fails_on_fixed else OutcomeClass.TN

    def confusion_counts(self, entries: Iterable[CorpusEntry]) -> ConfusionCounts:
        counts = {cls: 0 for cls in OutcomeClass}
        for entry in entries:
            counts[self.classify(entry.outcome)] += 1
        return ConfusionCounts(
            tp=counts[OutcomeClass.TP],
            fp=counts[OutcomeClass.FP],
            tn=counts[OutcomeClass.TN],
            fn=counts[OutcomeClass.FN],
        )

    def tp_record_ids(self, entries: Iterable[CorpusEntry]) -> Set[str]:
        return {e.record_id for e in entries if self.classify(e.outcome) == OutcomeClass.TP}

    def bugs_with_tp(self, entries: Iterable[CorpusEntry]) -> Set[str]:
        return {e.bug_id for e in entries if self.classify(e.outcome) == OutcomeClass.TP}

    def bug_found(self, entries: Iterable[CorpusEntry]) -> int:
        """Number of distinct bugs with at least one TP"""
        return len(self.bugs_with_tp(entries))

    def fpr(self, c: ConfusionCounts) -> float:
        """#FP / (#FP + #TN), 0 when the denominator is 0"""
        denominator = c.fp + c.tn
        return c.fp / denominator if denominator else 0.0

    def precision(self, c: ConfusionCounts) -> float:
        """#TP / (#TP + #FP), 0 when the denominator is 0"""
        denominator = c.tp + c.fp
        return c.tp / denominator if denominator else 0.0

    def first_tp_rank(self, ranked_list: Optional[RankedList], tp_ids: Set[str]) -> Optional[int]:
        """Rank of the first TP in the list, None when there is none"""
        if ranked_list is None:
            return None
        for entry in ranked_list.entries:
            if entry.record_id in tp_ids:
                return entry.rank
        return None

    def bug_rank_outcomes(
        self, universe: Sequence[str], ranked_by_bug: RankedByBug, tp_ids: Set[str]
    ) -> List[BugRankOutcome]:
        """One outcome per bug of the universe; bugs without a list have infinite rank"""
        return [
            BugRankOutcome(bug_id=bug_id, first_tp_rank=self.first_tp_rank(ranked_by_bug.get(bug_id), tp_ids))
            for bug_id in universe
        ]

    def found_at_k(self, bug_outcomes: Sequence[BugRankOutcome], k: int) -> FoundAtK:
        """
        Bugs whose first TP is ranked within the top k

        Returns:
            FoundAtK with the count and the count divided by the number of bugs

        Raises:
            EmptyBugUniverseError: when bug_outcomes is empty
        """
        if k < 1:
            raise ValueError("k must be at least 1")
        n = len(bug_outcomes)
        if n == 0:
            raise EmptyBugUniverseError()
        count = sum(1 for o in bug_outcomes if o.first_tp_rank is not None and o.first_tp_rank <= k)
        return FoundAtK(k=k, count=count, fraction=count / n)

    def bug_overlap(self, found_a: Set[str], found_b: Set[str]) -> BugOverlap:
        """Bugs found by both approaches, only by the first and only by the second"""
        return BugOverlap(
            both=len(found_a & found_b),
            only_first=len(found_a - found_b),
            only_second=len(found_b - found_a),
        )

    def kind_metrics(
        self,
        entries: Sequence[CorpusEntry],
        universe: Sequence[str],
        rankings: RunRankings,
        k_values: Sequence[int],
    ) -> KindMetrics:
        """Metrics of one oracle kind, ranked lists restricted to that kind's records"""
        confusion = self.confusion_counts(entries)
        record_ids = {e.record_id for e in entries}
        reported, _ = self._found_at_k_layers(
            universe, rankings.restricted_to(record_ids), self.tp_record_ids(entries), k_values
        )
        return KindMetrics(
            confusion=confusion,
            bug_found=self.bug_found(entries),
            fpr=self.fpr(confusion),
            precision=self.precision(confusion),
            found_at_k=reported,
        )

    def run_metrics(
        self,
        run_id: int,
        entries: Sequence[CorpusEntry],
        universe: Sequence[str],
        rankings: RunRankings,
        k_values: Sequence[int],
    ) -> RunMetrics:
        """
        Metrics of one run

        Args:
            run_id: Run index
            entries: Filtered entries of the run
            universe: Every bug of the benchmark, denominators of Found@K
            rankings: Ranked failed tests of the run
            k_values: K values for Found@K

        Returns:
            RunMetrics with the oracle-kind breakdown
        """
        # Whole-run counts and Found@K layers
        confusion = self.confusion_counts(entries)
        reported, by_seed = self._found_at_k_layers(universe, rankings, self.tp_record_ids(entries), k_values)

        # Same metrics per oracle kind
        by_kind = {
            kind.value: self.kind_metrics(
                [e for e in entries if e.record.oracle_kind == kind], universe, rankings, k_values
            )
            for kind in OracleKind
        }
        return RunMetrics(
            run_id=run_id,
            confusion=confusion,
            bug_found=self.bug_found(entries),
            fpr=self.fpr(confusion),
            precision=self.precision(confusion),
            found_at_k=reported,
            found_at_k_by_seed=by_seed,
            by_oracle_kind=by_kind,
        )

    def aggregate_runs(self, runs: Sequence[RunMetrics]) -> AggregateMetrics:
        """
        Arithmetic mean of every metric across runs, and across seeds for the per-seed layer

        Raises:
            ValueError: when there are no runs
        """
        if not runs:
            raise ValueError("aggregation needs at least one run")
        # Union of the K values over runs
        k_values = set()
        for run in runs:
            k_values.update(run.found_at_k)
            k_values.update(run.found_at_k_by_seed)
        return self._aggregate(runs, sorted(k_values))

    def aggregate_by_oracle_kind(self, runs: Sequence[RunMetrics]) -> Dict[str, AggregateMetrics]:
        """Per oracle kind, the mean of the kind's metrics across runs"""
        result = {}
        for kind in OracleKind:
            rows = [run.by_oracle_kind[kind.value] for run in runs if kind.value in run.by_oracle_kind]
            if rows:
                k_values = sorted({k for row in rows for k in row.found_at_k})
                result[kind.value] = self._aggregate(rows, k_values)
        return result

    def _found_at_k_layers(
        self, universe: Sequence[str], rankings: RunRankings, tp_ids: Set[str], k_values: Sequence[int]
    ):
        """Reported Found@K per k and the per-seed counts per k"""
        if not rankings.ranked:
            return {}, {}
        # First-TP ranks of the consensus list and of every seed list
        consensus_outcomes = self.bug_rank_outcomes(universe, rankings.consensus, tp_ids)
        seed_outcomes = [self.bug_rank_outcomes(universe, lists, tp_ids) for lists in rankings.per_seed]

        reported: Dict[int, FoundAtK] = {}
        by_seed: Dict[int, List[float]] = {}
        for k in k_values:
            per_seed = [self.found_at_k(outcomes, k) for outcomes in seed_outcomes]
            by_seed[k] = [float(f.count) for f in per_seed]
            # Reported value is the seed mean or the consensus count
            if rankings.average_seeds and per_seed:
                reported[k] = FoundAtK(
                    k=k,
                    count=float(np.mean([f.count for f in per_seed])),
                    fraction=float(np.mean([f.fraction for f in per_seed])),
                )
            else:
                reported[k] = self.found_at_k(consensus_outcomes, k)
        return reported, by_seed

    @staticmethod
    def _aggregate(rows: Sequence, k_values: Sequence[int]) -> AggregateMetrics:
        def mean(values) -> float:
            return float(np.mean(values)) if len(values) else 0.0

        # Found@K only where every row has it
        found = {}
        for k in k_values:
            if all(k in row.found_at_k for row in rows):
                found[k] = FoundAtK(
                    k=k,
                    count=mean([row.found_at_k[k].count for row in rows]),
                    fraction=mean([row.found_at_k[k].fraction for row in rows]),
                )
        # kind rows carry no seed layer
        seed_mean = {}
        for k in k_values:
            seed_rows = [getattr(row, "found_at_k_by_seed", {}).get(k) for row in rows]
            if seed_rows and all(seed_rows):
                seed_mean[k] = mean([mean(values) for values in seed_rows])

        return AggregateMetrics(
            tp=mean([row.confusion.tp for row in rows]),
            fp=mean([row.confusion.fp for row in rows]),
            tn=mean([row.confusion.tn for row in rows]),
            fn=mean([row.confusion.fn for row in rows]),
            bug_found=mean([row.bug_found for row in rows]),
            fpr=mean([row.fpr for row in rows]),
            precision=mean([row.precision for row in rows]),
            found_at_k=found,
            found_at_k_seed_mean=seed_mean,
        )


metrics_service = MetricsService()


def classify(outcome: ExecutionOutcome) -> OutcomeClass:
    return metrics_service.classify(outcome)


def bug_found(entries: Iterable[CorpusEntry]) -> int:
    return metrics_service.bug_found(entries)


def fpr(c: ConfusionCounts) -> float:
    return metrics_service.fpr(c)


def precision(c: ConfusionCounts) -> float:
    return metrics_service.precision(c)


def found_at_k(bug_outcomes: Sequence[BugRankOutcome], k: int) -> FoundAtK:
    return metrics_service.found_at_k(bug_outcomes, k)


def aggregate_runs(runs: Sequence[RunMetrics]) -> AggregateMetrics:
    return metrics_service.aggregate_runs(runs)
