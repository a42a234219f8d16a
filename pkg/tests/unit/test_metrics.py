"""
Unit tests for outcome classification and bug-finding metrics
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracle_rank.deps.exceptions import EmptyBugUniverseError, UnfilteredOutcomeError
from oracle_rank.schemas.corpus import OracleKind, OutcomeClass
from oracle_rank.schemas.metrics import BugRankOutcome, ConfusionCounts
from oracle_rank.services import metrics
from oracle_rank.services.metrics import MetricsService
from oracle_rank.services.ranker import rank_from_scores
from tests.utils.builders import make_entry, make_outcome

METRICS = MetricsService()


def ranked(bug_id, record_ids, run_id=0):
    scores = list(range(len(record_ids), 0, -1))
    return rank_from_scores(bug_id, run_id, record_ids, scores)


@pytest.fixture
def run_entries():
    """Three bugs; Bug-3 has no failures at all"""
    return [
        make_entry("a1", "FP", bug_id="Bug-1"),
        make_entry("a2", "TP", bug_id="Bug-1", oracle_kind=OracleKind.EXPECT_NO_EXCEPTION),
        make_entry("a3", "FP", bug_id="Bug-1"),
        make_entry("a4", "TN", bug_id="Bug-1"),
        make_entry("b1", "TP", bug_id="Bug-2"),
        make_entry("b2", "FN", bug_id="Bug-2"),
        make_entry("c1", "TN", bug_id="Bug-3"),
    ]


@pytest.mark.unit
class TestClassify:
    @pytest.mark.parametrize("outcome_class", ["TP", "FP", "TN", "FN"])
    def test_four_classes(self, outcome_class):
        assert metrics.classify(make_outcome("x", outcome_class)) == OutcomeClass(outcome_class)

    def test_compile_error_must_be_filtered(self):
        with pytest.raises(UnfilteredOutcomeError):
            metrics.classify(make_outcome("x", "FP", compile_error=True))


@pytest.mark.unit
class TestCounts:
    def test_confusion_and_ratios(self, run_entries):
        counts = METRICS.confusion_counts(run_entries)

        assert counts == ConfusionCounts(tp=2, fp=2, tn=2, fn=1)
        assert metrics.precision(counts) == pytest.approx(0.5)
        assert metrics.fpr(counts) == pytest.approx(0.5)
        assert metrics.bug_found(run_entries) == 2

    def test_zero_denominators(self):
        empty = ConfusionCounts()

        assert metrics.precision(empty) == 0.0
        assert metrics.fpr(empty) == 0.0

    def test_overlap(self):
        overlap = METRICS.bug_overlap({"A", "B", "C"}, {"B", "D"})

        assert (overlap.both, overlap.only_first, overlap.only_second) == (1, 2, 1)


@pytest.mark.unit
class TestFoundAtK:
    """First-TP ranks and Found@K"""

    def test_first_tp_rank(self):
        lst = ranked("Bug-1", ["a1", "a3", "a2"])

        assert METRICS.first_tp_rank(lst, {"a2"}) == 3
        assert METRICS.first_tp_rank(lst, set()) is None
        assert METRICS.first_tp_rank(None, {"a2"}) is None

    def test_bugs_without_list_are_infinite(self):
        outcomes = METRICS.bug_rank_outcomes(["Bug-1", "Bug-2"], {"Bug-1": ranked("Bug-1", ["a2"])}, {"a2"})

        assert outcomes[0].first_tp_rank == 1
        assert outcomes[1].is_infinite

    def test_counts_and_fraction(self):
        outcomes = [
            BugRankOutcome(bug_id="A", first_tp_rank=1),
            BugRankOutcome(bug_id="B", first_tp_rank=4),
            BugRankOutcome(bug_id="C"),
            BugRankOutcome(bug_id="D", first_tp_rank=2),
        ]

        at_1 = metrics.found_at_k(outcomes, 1)
        at_3 = metrics.found_at_k(outcomes, 3)

        assert (at_1.count, at_1.fraction) == (1, 0.25)
        assert (at_3.count, at_3.fraction) == (2, 0.5)

    def test_empty_universe(self):
        with pytest.raises(EmptyBugUniverseError):
            metrics.found_at_k([], 1)

    def test_k_must_be_positive(self):
        with pytest.raises(ValueError):
            metrics.found_at_k([BugRankOutcome(bug_id="A")], 0)

    @settings(max_examples=200, deadline=None)
    @given(ranks=st.lists(st.one_of(st.none(), st.integers(min_value=1, max_value=30)), min_size=1, max_size=40))
    def test_monotone_in_k_with_bug_found_limit(self, ranks):
        outcomes = [BugRankOutcome(bug_id=f"B{i}", first_tp_rank=r) for i, r in enumerate(ranks)]

        counts = [metrics.found_at_k(outcomes, k).count for k in range(1, 32)]

        assert counts == sorted(counts)
        assert counts[-1] == sum(1 for r in ranks if r is not None)


@pytest.mark.unit
class TestRunMetrics:
    """Per-run metrics, oracle-kind breakdown and aggregation"""

    def test_run_with_consensus_ranking(self, run_entries):
        rankings = metrics.RunRankings(
            consensus={"Bug-1": ranked("Bug-1", ["a1", "a2", "a3"]), "Bug-2": ranked("Bug-2", ["b1"])},
            per_seed=[
                {"Bug-1": ranked("Bug-1", ["a2", "a1", "a3"]), "Bug-2": ranked("Bug-2", ["b1"])},
                {"Bug-1": ranked("Bug-1", ["a3", "a1", "a2"]), "Bug-2": ranked("Bug-2", ["b1"])},
            ],
        )

        run = METRICS.run_metrics(0, run_entries, ["Bug-1", "Bug-2", "Bug-3"], rankings, [1, 2])

        assert run.bug_found == 2
        assert run.found_at_k[1].count == 1
        assert run.found_at_k[1].fraction == pytest.approx(1 / 3)
        assert run.found_at_k[2].count == 2
        assert run.found_at_k_by_seed[1] == [2.0, 1.0]
        assert run.found_at_k_by_seed[2] == [2.0, 1.0]

    def test_average_seeds_reports_seed_mean(self, run_entries):
        rankings = metrics.RunRankings(
            consensus={"Bug-1": ranked("Bug-1", ["a1", "a2", "a3"])},
            per_seed=[{"Bug-1": ranked("Bug-1", ["a2", "a1", "a3"])}, {"Bug-1": ranked("Bug-1", ["a1", "a3", "a2"])}],
            average_seeds=True,
        )

        run = METRICS.run_metrics(0, run_entries, ["Bug-1", "Bug-2", "Bug-3"], rankings, [1])

        assert run.found_at_k[1].count == pytest.approx(0.5)

    def test_unranked_approach_has_no_found_at_k(self, run_entries):
        run = METRICS.run_metrics(0, run_entries, ["Bug-1", "Bug-2", "Bug-3"], metrics.RunRankings(), [1, 5])

        assert run.found_at_k == {}
        assert run.found_at_k_by_seed == {}

    def test_oracle_kind_breakdown(self, run_entries):
        rankings = metrics.RunRankings(consensus={"Bug-1": ranked("Bug-1", ["a1", "a3", "a2"])})

        run = METRICS.run_metrics(0, run_entries, ["Bug-1", "Bug-2", "Bug-3"], rankings, [1])

        no_exception = run.by_oracle_kind[OracleKind.EXPECT_NO_EXCEPTION.value]
        assertion = run.by_oracle_kind[OracleKind.ASSERTION.value]
        assert no_exception.confusion == ConfusionCounts(tp=1)
        assert no_exception.found_at_k[1].count == 1  # restricted list is just a2
        assert assertion.confusion == ConfusionCounts(tp=1, fp=2, tn=2, fn=1)
        assert assertion.found_at_k[1].count == 0
        assert run.by_oracle_kind[OracleKind.EXPECT_EXCEPTION.value].confusion.total == 0

    def test_aggregate_means_across_runs(self, run_entries):
        universe = ["Bug-1", "Bug-2", "Bug-3"]
        first = METRICS.run_metrics(0, run_entries, universe, metrics.RunRankings(), [1])
        second = METRICS.run_metrics(1, run_entries[:4], universe, metrics.RunRankings(), [1])

        aggregate = metrics.aggregate_runs([first, second])

        assert aggregate.bug_found == pytest.approx(1.5)
        assert aggregate.tp == pytest.approx(1.5)
        assert aggregate.precision == pytest.approx((0.5 + 1 / 3) / 2)

    def test_aggregate_needs_runs(self):
        with pytest.raises(ValueError):
            metrics.aggregate_runs([])
