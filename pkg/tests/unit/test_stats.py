"""
Unit tests for the Wilcoxon signed-rank test and Cliff's delta
"""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as scipy_stats

from oracle_rank.deps.exceptions import SampleMismatchError
from oracle_rank.schemas.stats import EffectMagnitude
from oracle_rank.services.stats import EXACT_MAX_N_LIMIT, SignificanceService, cliffs_delta, wilcoxon_signed_rank

STATS = SignificanceService()
paired_sample = STATS.paired_sample
classify_magnitude = SignificanceService.classify_magnitude


def enumerated_p(differences):
    """Two-sided p by enumerating all 2^n sign assignments of the ranks"""
    d = np.asarray(differences, dtype=float)
    ranks = scipy_stats.rankdata(np.abs(d))
    observed = min(ranks[d > 0].sum(), ranks[d < 0].sum())
    n = len(d)
    at_most = 0
    for signs in itertools.product((0, 1), repeat=n):
        w_plus = sum(r for r, s in zip(ranks, signs) if s)
        if w_plus <= observed + 1e-9:
            at_most += 1
    return min(1.0, 2.0 * at_most / 2**n)


def brute_force_delta(a, b):
    greater = sum(1 for x in a for y in b if x > y)
    less = sum(1 for x in a for y in b if x < y)
    return (greater - less) / (len(a) * len(b))


@pytest.mark.unit
class TestWilcoxon:
    """Exact and approximate signed-rank p-values"""

    def test_all_positive_small_sample(self):
        result = wilcoxon_signed_rank(paired_sample([2, 3, 4, 5, 6], [1, 1, 1, 1, 1]))

        assert result.method == "exact"
        assert result.statistic == 0.0
        assert result.p_value == pytest.approx(2 / 32)

    def test_all_zero_differences(self):
        result = wilcoxon_signed_rank(paired_sample([1, 2, 3], [1, 2, 3]))

        assert result.p_value == 1.0
        assert result.method == "degenerate"

    def test_zeros_are_dropped(self):
        with_zeros = wilcoxon_signed_rank(paired_sample([1, 5, 2, 8, 3], [1, 4, 2, 6, 5]))
        without = wilcoxon_signed_rank(paired_sample([5, 8, 3], [4, 6, 5]))

        assert with_zeros.n_effective == 3
        assert with_zeros.p_value == pytest.approx(without.p_value)

    def test_unequal_lengths(self):
        with pytest.raises(SampleMismatchError):
            paired_sample([1, 2], [1])

    def test_empty(self):
        with pytest.raises(SampleMismatchError):
            paired_sample([], [])

    @settings(max_examples=200, deadline=None)
    @given(
        values=st.lists(st.integers(min_value=1, max_value=10_000), min_size=1, max_size=12, unique=True),
        signs=st.lists(st.booleans(), min_size=12, max_size=12),
    )
    def test_exact_matches_enumeration(self, values, signs):
        """Tie-free inputs with n <= 12 against the 2^n enumeration"""
        d = [v if s else -v for v, s in zip(values, signs)]

        result = wilcoxon_signed_rank(paired_sample(d, [0] * len(d)))

        assert result.method == "exact"
        assert result.p_value == pytest.approx(enumerated_p(d), abs=1e-12)

    def test_exact_with_ties_matches_enumeration(self):
        d = [1, -1, 2, 2, -3, 4, 4, 4]

        result = wilcoxon_signed_rank(paired_sample(d, [0] * len(d)))

        assert result.p_value == pytest.approx(enumerated_p(d), abs=1e-12)

    def test_n30_reference_case(self):
        """Normal approximation against scipy on a fixed n=30 sample"""
        rng = np.random.default_rng(2024)
        a = rng.normal(0.4, 1.0, size=30).round(3)
        b = rng.normal(0.0, 1.0, size=30).round(3)

        result = wilcoxon_signed_rank(paired_sample(a.tolist(), b.tolist()))
        reference = scipy_stats.wilcoxon(a, b, zero_method="wilcox", correction=True, method="approx")

        assert result.method == "approx"
        assert result.statistic == pytest.approx(reference.statistic)
        assert result.p_value == pytest.approx(reference.pvalue, abs=1e-3)

    def test_exact_threshold_is_configurable(self):
        sample = paired_sample([2, 3, 4, 5, 6], [1, 1, 1, 1, 1])

        assert wilcoxon_signed_rank(sample, exact_max_n=4).method == "approx"

    def test_exact_threshold_is_capped(self):
        a = list(range(1, EXACT_MAX_N_LIMIT + 11))
        sample = paired_sample(a, [0] * len(a))

        result = SignificanceService(exact_max_n=10_000).wilcoxon(sample)

        assert result.method == "approx"
        assert result.n_effective == EXACT_MAX_N_LIMIT + 10

    @settings(max_examples=200, deadline=None)
    @given(
        pairs=st.lists(
            st.tuples(st.integers(min_value=-50, max_value=50), st.integers(min_value=-50, max_value=50)),
            min_size=1,
            max_size=40,
        ),
        shift=st.integers(min_value=-1000, max_value=1000),
    )
    def test_common_shift_leaves_result_unchanged(self, pairs, shift):
        """Adding one constant to both samples changes no paired difference"""
        a = [x for x, _ in pairs]
        b = [y for _, y in pairs]

        base = wilcoxon_signed_rank(paired_sample(a, b))
        shifted = wilcoxon_signed_rank(paired_sample([x + shift for x in a], [y + shift for y in b]))

        assert shifted == base


@pytest.mark.unit
class TestCliffsDelta:
    def test_complete_dominance(self):
        assert cliffs_delta([5, 6, 7], [1, 2]).delta == 1.0
        assert cliffs_delta([1, 2], [5, 6, 7]).delta == -1.0

    def test_identical(self):
        effect = cliffs_delta([1, 2, 3], [1, 2, 3])

        assert effect.delta == 0.0
        assert effect.magnitude == EffectMagnitude.NEGLIGIBLE

    def test_empty(self):
        with pytest.raises(SampleMismatchError):
            cliffs_delta([], [1.0])

    @settings(max_examples=500, deadline=None)
    @given(
        a=st.lists(st.integers(min_value=0, max_value=20), min_size=1, max_size=15),
        b=st.lists(st.integers(min_value=0, max_value=20), min_size=1, max_size=15),
    )
    def test_matches_brute_force(self, a, b):
        delta = cliffs_delta(a, b).delta

        assert delta == brute_force_delta(a, b)
        assert cliffs_delta(b, a).delta == -delta

    @pytest.mark.parametrize(
        "delta,magnitude",
        [
            (0.147 - 1e-9, EffectMagnitude.NEGLIGIBLE),
            (0.147 + 1e-9, EffectMagnitude.SMALL),
            (0.33 - 1e-9, EffectMagnitude.SMALL),
            (0.33 + 1e-9, EffectMagnitude.MEDIUM),
            (0.474 - 1e-9, EffectMagnitude.MEDIUM),
            (0.474 + 1e-9, EffectMagnitude.LARGE),
            (-0.474 - 1e-9, EffectMagnitude.LARGE),
            (-0.2, EffectMagnitude.SMALL),
        ],
    )
    def test_band_boundaries(self, delta, magnitude):
        assert classify_magnitude(delta) == magnitude


@pytest.mark.unit
class TestCompare:
    def test_verdict(self):
        result = SignificanceService(alpha=0.05).compare("found_at_5", [5, 6, 7, 8, 9, 10], [1, 2, 2, 3, 1, 2])

        assert result.mean_a == pytest.approx(7.5)
        assert result.mean_b == pytest.approx(11 / 6)
        assert result.p_value == pytest.approx(2 / 64)
        assert result.significant
        assert result.magnitude == EffectMagnitude.LARGE
        assert result.n == 6
