"""
Unit tests for the Isolation Forest
"""

import math

import numpy as np
import pytest

from oracle_rank.deps.exceptions import EmptyFitSetError
from oracle_rank.services.isolation_forest import LEAF, IsolationForestService, anomaly_score, fit

FOREST = IsolationForestService()
average_path_length = IsolationForestService.average_path_length


@pytest.fixture
def cluster_with_outlier():
    rng = np.random.default_rng(3)
    X = rng.normal(0.0, 1.0, size=(60, 4))
    X[17] = [12.0, -12.0, 12.0, -12.0]
    return X


@pytest.mark.unit
class TestAveragePathLength:
    def test_small_sizes(self):
        assert average_path_length(0) == 0.0
        assert average_path_length(1) == 0.0
        # c(2) = 2 (ln 1 + gamma) - 1
        assert float(average_path_length(2)) == pytest.approx(2 * 0.5772156649 - 1.0)

    def test_matches_formula(self):
        m = 256
        expected = 2 * (math.log(m - 1) + 0.5772156649) - 2 * (m - 1) / m

        assert float(average_path_length(m)) == pytest.approx(expected)

    def test_vectorised(self):
        values = average_path_length(np.array([1, 2, 10]))

        assert values.shape == (3,)
        assert values[0] == 0.0 and values[2] > values[1]


@pytest.mark.unit
class TestFit:
    """Structure of fitted forests"""

    def test_empty_set_rejected(self):
        with pytest.raises(EmptyFitSetError):
            fit(np.empty((0, 11)))

    def test_default_subsample_and_height(self, cluster_with_outlier):
        model = fit(cluster_with_outlier, num_trees=20, seed=1)

        assert model.subsample_size == 60
        assert model.height_limit == math.ceil(math.log2(60))
        assert model.roots.size == 20

    def test_oversized_subsample_is_clamped(self, cluster_with_outlier):
        model = fit(cluster_with_outlier, num_trees=5, subsample_size=1000, seed=1)

        assert model.subsample_size == 60

    def test_trees_respect_height_limit(self, cluster_with_outlier):
        model = fit(cluster_with_outlier, num_trees=25, subsample_size=32, seed=4)

        for tree in range(model.num_trees):
            assert model.tree_height(tree) <= model.height_limit

    def test_leaf_sizes_sum_to_subsample(self, cluster_with_outlier):
        model = fit(cluster_with_outlier, num_trees=10, subsample_size=32, seed=4)

        for tree in range(model.num_trees):
            nodes = model.tree_nodes(tree)
            leaves = nodes[model.feature[nodes] == LEAF]
            assert model.size[leaves].sum() == 32

    def test_thresholds_inside_split_range(self, cluster_with_outlier):
        model = fit(cluster_with_outlier, num_trees=10, seed=9)
        internal = model.feature != LEAF

        assert np.all(model.threshold[internal] > model.split_low[internal])
        assert np.all(model.threshold[internal] < model.split_high[internal])

    def test_identical_points_make_single_leaves(self):
        model = fit(np.ones((8, 3)), num_trees=4, seed=0)

        assert model.num_nodes == 4
        assert np.all(model.feature == LEAF)

    def test_same_seed_same_forest(self, cluster_with_outlier):
        first = fit(cluster_with_outlier, num_trees=10, seed=5)
        second = fit(cluster_with_outlier, num_trees=10, seed=5)

        np.testing.assert_array_equal(first.threshold, second.threshold)
        np.testing.assert_array_equal(first.feature, second.feature)


@pytest.mark.unit
class TestScores:
    def test_scores_in_unit_interval(self, cluster_with_outlier):
        model = fit(cluster_with_outlier, num_trees=50, seed=2)
        scores = FOREST.score_samples(model, cluster_with_outlier)

        assert scores.shape == (60,)
        assert np.all((scores > 0.0) & (scores <= 1.0))

    def test_outlier_scores_highest(self, cluster_with_outlier):
        model = fit(cluster_with_outlier, num_trees=100, seed=2)
        scores = FOREST.score_samples(model, cluster_with_outlier)

        assert int(np.argmax(scores)) == 17

    def test_single_point_forest_scores_half(self):
        model = fit(np.array([[1.0, 2.0]]), num_trees=3, seed=0)

        np.testing.assert_array_equal(FOREST.score_samples(model, np.array([[1.0, 2.0], [9.0, 9.0]])), [0.5, 0.5])

    def test_path_lengths_shape(self, cluster_with_outlier):
        model = fit(cluster_with_outlier, num_trees=7, seed=2)

        assert FOREST.path_lengths(model, cluster_with_outlier[:5]).shape == (7, 5)

    def test_anomaly_score_matches_batch(self, cluster_with_outlier):
        model = fit(cluster_with_outlier, num_trees=30, seed=8)
        scores = FOREST.score_samples(model, cluster_with_outlier)

        assert anomaly_score(model, cluster_with_outlier[17]) == pytest.approx(scores[17])

    def test_deterministic_per_seed(self, cluster_with_outlier):
        first = FOREST.score_samples(fit(cluster_with_outlier, num_trees=30, seed=11), cluster_with_outlier)
        second = FOREST.score_samples(fit(cluster_with_outlier, num_trees=30, seed=11), cluster_with_outlier)
        other = FOREST.score_samples(fit(cluster_with_outlier, num_trees=30, seed=12), cluster_with_outlier)

        np.testing.assert_array_equal(first, second)
        assert not np.array_equal(first, other)

    def test_two_points_split_once_score_equal(self):
        model = fit(np.array([[0.0, 3.0], [1.0, 3.0]]), num_trees=20, seed=6)
        scores = FOREST.score_samples(model, np.array([[0.0, 3.0], [1.0, 3.0]]))

        assert scores[0] == scores[1]
        assert scores[0] == pytest.approx(2.0 ** (-1.0 / float(average_path_length(2))))

    @pytest.mark.parametrize("seed", range(5))
    def test_duplicated_point_is_not_easier_to_isolate_than_a_far_point(self, seed):
        rng = np.random.default_rng(seed)
        duplicated = np.zeros(3)
        X = np.vstack([rng.normal(0.0, 1.0, size=(20, 3)), np.tile(duplicated, (30, 1))])
        far = np.full(3, 20.0)

        model = fit(X, num_trees=100, seed=seed)
        paths = FOREST.path_lengths(model, np.vstack([duplicated, far])).mean(axis=0)

        assert paths[0] >= paths[1]
        assert FOREST.anomaly_score(model, far) >= FOREST.anomaly_score(model, duplicated)


@pytest.mark.unit
class TestIsolationForestService:
    def test_service_defaults_shape_the_forest(self, cluster_with_outlier):
        service = IsolationForestService(num_trees=12, max_samples=16)

        model = service.fit(cluster_with_outlier, seed=3)

        assert model.num_trees == 12
        assert model.subsample_size == 16

    def test_module_fit_matches_service(self, cluster_with_outlier):
        first = fit(cluster_with_outlier, num_trees=10, seed=5)
        second = IsolationForestService().fit(cluster_with_outlier, seed=5, num_trees=10)

        np.testing.assert_array_equal(first.threshold, second.threshold)
