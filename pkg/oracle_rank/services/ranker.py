"""
Per-bug ranking of failed tests: Isolation Forest consensus and random baseline
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from oracle_rank.core.config import settings
from oracle_rank.deps.exceptions import MixedBugSetError, SampleMismatchError
from oracle_rank.schemas.features import FailedTest, FeatureVector
from oracle_rank.schemas.ranking import RankedEntry, RankedList, RankingMethod
from oracle_rank.services.isolation_forest import (
    DEFAULT_MAX_SAMPLES,
    DEFAULT_NUM_TREES,
    IsolationForestService,
)

logger = logging.getLogger(__name__)


def _bug_and_run(bug_failed_set: Sequence[FailedTest]) -> Tuple[str, int]:
    keys = list(dict.fromkeys((t.record.bug_id, t.record.run_id) for t in bug_failed_set))
    if len(keys) > 1:
        raise MixedBugSetError(f"ranking needs one (bug_id, run_id), got {keys}")
    return keys[0] if keys else ("", 0)


def rank_from_scores(bug_id: str, run_id: int, record_ids: Sequence[str], scores) -> RankedList:
    """
    Rank records by score, highest first; equal scores keep input order

    Args:
        bug_id: Bug of the list
        run_id: Run of the list
        record_ids: Record ids in corpus order
        scores: One score per record

    Returns:
        RankedList with ranks 1..n
    """
    scores = np.asarray(scores, dtype=float)
    # Stable sort keeps corpus order on ties
    if scores.shape[0] != len(record_ids):
        raise SampleMismatchError(f"{len(record_ids)} records but {scores.shape[0]} scores")
    order = np.argsort(-scores, kind="stable")
    entries = [
        RankedEntry(record_id=record_ids[i], anomaly_score=float(scores[i]), rank=rank)
        for rank, i in enumerate(order, start=1)
    ]
    return RankedList(bug_id=bug_id, run_id=run_id, entries=entries)


def rank_failed_tests(
    bug_failed_set: Sequence[FailedTest],
    vectors: Sequence[FeatureVector],
    num_repeats: int = 10,
    seeds: Optional[Sequence[int]] = None,
    num_trees: int = DEFAULT_NUM_TREES,
    max_samples: int = DEFAULT_MAX_SAMPLES,
) -> RankedList:
    """
    Consensus ranking of one bug's failed tests by mean anomaly score

    Args:
        bug_failed_set: Failed tests of a single (bug, run), corpus order
        vectors: Feature vectors aligned with bug_failed_set
        num_repeats: Number of forests
        seeds: One seed per forest; defaults to 0..num_repeats-1

    Raises:
        SampleMismatchError: seeds/num_repeats or vectors/tests disagree in length
        MixedBugSetError: tests from more than one bug or run
    """
    seeds = list(range(num_repeats)) if seeds is None else list(seeds)
    if len(seeds) != num_repeats:
        raise SampleMismatchError(f"expected {num_repeats} seeds, got {len(seeds)}")
    ranker = FailedTestRanker(RankingMethod.IFOREST, seeds, num_trees=num_trees, max_samples=max_samples)
    return ranker.rank(bug_failed_set, vectors).consensus


def random_ranking(bug_failed_set: Sequence[FailedTest], seed: int) -> RankedList:
    """Uniform random permutation of the failed tests; scores are 0"""
    bug_id, run_id = _bug_and_run(bug_failed_set)
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(bug_failed_set))
    entries = [
        RankedEntry(record_id=bug_failed_set[i].record_id, anomaly_score=0.0, rank=rank)
        for rank, i in enumerate(order, start=1)
    ]
    return RankedList(bug_id=bug_id, run_id=run_id, entries=entries)


@dataclass(frozen=True)
class BugRanking:
    """Consensus list plus one list per ranking seed for a single (bug, run)"""

    consensus: RankedList
    per_seed: List[RankedList]


class FailedTestRanker:
    """
    Ranks the failed tests of one (bug, run) with the configured method
    """

    def __init__(
        self,
        method: RankingMethod,
        seeds: Sequence[int],
        num_trees: Optional[int] = None,
        max_samples: Optional[int] = None,
    ):
        self.method = method
        self.seeds = list(seeds)
        self.num_trees = num_trees or settings.iforest_num_trees
        self.max_samples = max_samples or settings.iforest_max_samples
        self.forest = IsolationForestService(num_trees=self.num_trees, max_samples=self.max_samples)

    def rank(self, bug_failed_set: Sequence[FailedTest], vectors: Sequence[FeatureVector]) -> BugRanking:
        """
        Rank one bug's failed tests

        For iforest the consensus list ranks by score averaged over seeds; for
        random the consensus list is the permutation of the first seed.

        Returns:
            BugRanking with the consensus list and one list per seed

        Raises:
            SampleMismatchError: vectors and tests disagree in length
            MixedBugSetError: tests from more than one bug or run
        """
        # Validate alignment and bug
        if len(vectors) != len(bug_failed_set):
            raise SampleMismatchError(f"{len(bug_failed_set)} tests but {len(vectors)} feature vectors")
        bug_id, run_id = _bug_and_run(bug_failed_set)
        record_ids = [t.record_id for t in bug_failed_set]

        if self.method == RankingMethod.IFOREST:
            # one forest per seed, then the mean score across forests
            scores = self.scores_by_seed(vectors)
            per_seed = [rank_from_scores(bug_id, run_id, record_ids, row) for row in scores]
            mean_scores = scores.mean(axis=0) if scores.size else np.zeros(0)
            consensus = rank_from_scores(bug_id, run_id, record_ids, mean_scores)
        elif self.method == RankingMethod.RANDOM:
            # first seed doubles as the consensus
            per_seed = [random_ranking(bug_failed_set, seed) for seed in self.seeds]
            consensus = per_seed[0]
        else:
            raise ValueError("ranking method required")

        logger.debug(
            f"Ranked {len(record_ids)} failed tests",
            extra={"event_type": "rank", "bug_id": bug_id, "run_id": run_id, "count": len(record_ids)},
        )
        return BugRanking(consensus=consensus, per_seed=per_seed)

    def scores_by_seed(self, vectors) -> np.ndarray:
        """
        Fit one forest per seed on the vectors and score them

        Returns:
            len(seeds) x n score matrix (n x 0 shaped when vectors is empty)
        """
        X = self.forest.as_matrix(vectors)
        # Empty set yields an empty row per seed
        n = X.shape[0]
        if n == 0:
            return np.zeros((len(self.seeds), 0))
        return np.vstack(
            [self.forest.score_samples(self.forest.fit(X, seed=seed), X) for seed in self.seeds]
        )


def format_ranked_dump(lists: Sequence[RankedList]) -> str:
    """
    Render bug_id, run_id, rank, record_id and mean score, tab-separated, sorted by bug, run and rank
    """
    lines = []
    for ranked in sorted(lists, key=lambda r: (r.bug_id, r.run_id)):
        for entry in ranked.entries:
            lines.append(
                f"{ranked.bug_id}\t{ranked.run_id}\t{entry.rank}\t{entry.record_id}\t{entry.anomaly_score:.6f}"
            )
    return "".join(line + "\n" for line in lines)
