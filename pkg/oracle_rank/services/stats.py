"""
Paired significance testing: Wilcoxon signed-rank test and Cliff's delta
"""

import logging
import math
from typing import Optional, Sequence

import numpy as np
from scipy.stats import norm, rankdata

from oracle_rank.core.config import settings
from oracle_rank.deps.exceptions import SampleMismatchError
from oracle_rank.schemas.stats import (
    ComparisonResult,
    EffectMagnitude,
    EffectSize,
    PairedSample,
    WilcoxonResult,
)

logger = logging.getLogger(__name__)

# upper bounds of |delta| for each band; anything above is Large
NEGLIGIBLE_BOUND = 0.147
SMALL_BOUND = 0.33
MEDIUM_BOUND = 0.474

# sign-assignment counts of larger samples no longer fit in int64
EXACT_MAX_N_LIMIT = 60


def _exact_lower_tail(doubled_ranks: np.ndarray, doubled_statistic: int) -> float:
    """P(T+ <= W) under H0, counting sign assignments by dynamic programming"""
    total = int(doubled_ranks.sum())
    counts = np.zeros(total + 1, dtype=np.int64)
    counts[0] = 1
    for rank in doubled_ranks:
        rank = int(rank)
        shifted = np.zeros_like(counts)
        shifted[rank:] = counts[: total + 1 - rank]
        counts = counts + shifted
    return float(counts[: doubled_statistic + 1].sum()) / float(2 ** doubled_ranks.size)


class SignificanceService:
    """
    Paired comparison of two approaches' metric vectors

    ``alpha`` and ``exact_max_n`` fall back to the configured values when
    not given; ``exact_max_n`` is capped at EXACT_MAX_N_LIMIT.
    """

    def __init__(self, alpha: Optional[float] = None, exact_max_n: Optional[int] = None):
        self.alpha = alpha
        self.exact_max_n = exact_max_n

    def paired_sample(self, a: Sequence[float], b: Sequence[float]) -> PairedSample:
        """
        Raises:
            SampleMismatchError: for empty or unequal-length inputs
        """
        if len(a) != len(b):
            raise SampleMismatchError(f"paired samples differ in length: {len(a)} vs {len(b)}")
        if not len(a):
            raise SampleMismatchError("paired samples must not be empty")
        return PairedSample(a=list(a), b=list(b))

    def wilcoxon(self, sample: PairedSample, exact_max_n: Optional[int] = None) -> WilcoxonResult:
        """
        Two-sided Wilcoxon signed-rank test on paired differences a - b

        Zero differences are dropped and tied |d| get average ranks. The
        statistic is W = min(W+, W-). Up to ``exact_max_n`` non-zero
        differences the p-value comes from the exact null distribution,
        above that from the normal approximation with tie and continuity
        correction.

        Args:
            sample: Paired metric vectors
            exact_max_n: Largest n tested exactly; defaults to the service's value

        Returns:
            WilcoxonResult; p = 1 when every difference is zero
        """
        if exact_max_n is None:
            exact_max_n = settings.exact_wilcoxon_max_n if self.exact_max_n is None else self.exact_max_n
        exact_max_n = min(exact_max_n, EXACT_MAX_N_LIMIT)

        # Non-zero differences and their average ranks
        d = np.asarray(sample.a, dtype=float) - np.asarray(sample.b, dtype=float)
        d = d[d != 0]
        n = int(d.size)
        if n == 0:
            return WilcoxonResult(statistic=0.0, p_value=1.0, n_effective=0, method="degenerate")

        ranks = rankdata(np.abs(d), method="average")
        w_plus = float(ranks[d > 0].sum())
        w_minus = float(ranks[d < 0].sum())
        statistic = min(w_plus, w_minus)

        # Exact tail on doubled ranks so half ranks stay integral
        if n <= exact_max_n:
            doubled = np.rint(ranks * 2).astype(np.int64)
            p = 2.0 * _exact_lower_tail(doubled, int(round(statistic * 2)))
            method = "exact"
        else:
            # normal approximation with tie and continuity correction
            mean = n * (n + 1) / 4.0
            _, tie_counts = np.unique(ranks, return_counts=True)
            variance = n * (n + 1) * (2 * n + 1) / 24.0 - float((tie_counts**3 - tie_counts).sum()) / 48.0
            correction = 0.5 * np.sign(statistic - mean)
            z = (statistic - mean - correction) / math.sqrt(variance) if variance > 0 else 0.0
            p = 2.0 * float(norm.sf(abs(z)))
            method = "approx"

        return WilcoxonResult(statistic=statistic, p_value=min(1.0, p), n_effective=n, method=method)

    @staticmethod
    def classify_magnitude(delta: float) -> EffectMagnitude:
        """Band of |delta|: < 0.147 Negligible, < 0.33 Small, < 0.474 Medium, else Large"""
        size = abs(delta)
        if size < NEGLIGIBLE_BOUND:
            return EffectMagnitude.NEGLIGIBLE
        if size < SMALL_BOUND:
            return EffectMagnitude.SMALL
        if size < MEDIUM_BOUND:
            return EffectMagnitude.MEDIUM
        return EffectMagnitude.LARGE

    def cliffs_delta(self, a: Sequence[float], b: Sequence[float]) -> EffectSize:
        """
        Cliff's delta over all cross pairs: (#(x > y) - #(x < y)) / (|a| |b|)

        Raises:
            SampleMismatchError: when either input is empty
        """
        if not len(a) or not len(b):
            raise SampleMismatchError("Cliff's delta needs two non-empty samples")
        x = np.asarray(a, dtype=float)[:, None]
        y = np.asarray(b, dtype=float)[None, :]
        greater = int((x > y).sum())
        less = int((x < y).sum())
        delta = (greater - less) / (x.shape[0] * y.shape[1])
        return EffectSize(delta=delta, magnitude=self.classify_magnitude(delta))

    def compare(self, name: str, a: Sequence[float], b: Sequence[float]) -> ComparisonResult:
        """
        Paired comparison of one metric between two approaches

        Args:
            name: Metric name
            a: Per-run (or per-seed) values of the first approach
            b: Paired values of the second approach

        Returns:
            ComparisonResult with means, Wilcoxon and Cliff's delta
        """
        # Fall back to the configured alpha
        alpha = settings.significance_level if self.alpha is None else self.alpha
        sample = self.paired_sample(a, b)
        test = self.wilcoxon(sample)
        effect = self.cliffs_delta(sample.a, sample.b)
        logger.debug(f"Compared {name}: p={test.p_value:.4g}, delta={effect.delta:.4g}")
        return ComparisonResult(
            metric=name,
            mean_a=float(np.mean(sample.a)),
            mean_b=float(np.mean(sample.b)),
            statistic=test.statistic,
            p_value=test.p_value,
            delta=effect.delta,
            magnitude=effect.magnitude,
            significant=test.p_value < alpha,
            method=test.method,
            n=len(sample.a),
        )


significance_service = SignificanceService()


def wilcoxon_signed_rank(sample: PairedSample, exact_max_n: Optional[int] = None) -> WilcoxonResult:
    return significance_service.wilcoxon(sample, exact_max_n=exact_max_n)


def cliffs_delta(a: Sequence[float], b: Sequence[float]) -> EffectSize:
    return significance_service.cliffs_delta(a, b)
