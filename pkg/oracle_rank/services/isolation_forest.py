"""
Isolation Forest over ranking feature vectors

Trees are stored as flat node arrays shared by the whole forest. A node with
feature == LEAF is a leaf; internal nodes send points with
x[feature] < threshold to ``left`` and the rest to ``right``. All trees of a
forest grow together, one depth level at a time.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Union

import numpy as np

from oracle_rank.deps.exceptions import EmptyFitSetError
from oracle_rank.schemas.features import FeatureVector
from oracle_rank.services.feature_extractor import FeatureExtractorService

logger = logging.getLogger(__name__)

LEAF = -1
EULER_GAMMA = 0.5772156649
DEFAULT_NUM_TREES = 100
DEFAULT_MAX_SAMPLES = 256

FeatureInput = Union[np.ndarray, Sequence[FeatureVector]]


@dataclass(frozen=True)
class IsolationForestModel:
    """A fitted forest; immutable and safe to share between threads"""

    num_trees: int
    subsample_size: int
    seed: int
    height_limit: int
    roots: np.ndarray
    node_tree: np.ndarray
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    size: np.ndarray
    depth: np.ndarray
    # min/max of the split feature over the node sample, NaN for leaves
    split_low: np.ndarray
    split_high: np.ndarray

    @property
    def num_nodes(self) -> int:
        return int(self.feature.size)

    def tree_nodes(self, tree: int) -> np.ndarray:
        """Node ids belonging to one tree"""
        return np.flatnonzero(self.node_tree == tree)

    def tree_height(self, tree: int) -> int:
        return int(self.depth[self.tree_nodes(tree)].max())


class IsolationForestService:
    """
    Fits isolation forests and scores points against them
    """

    def __init__(self, num_trees: int = DEFAULT_NUM_TREES, max_samples: int = DEFAULT_MAX_SAMPLES):
        self.num_trees = num_trees
        self.max_samples = max_samples
        self.features = FeatureExtractorService()

    @staticmethod
    def average_path_length(m) -> np.ndarray:
        """
        c(m) = 2 H(m - 1) - 2 (m - 1) / m with H(i) = ln(i) + 0.5772156649, and c(m) = 0 for m <= 1

        Args:
            m: Sample size, scalar or array

        Returns:
            c(m), same shape as m
        """
        m = np.asarray(m, dtype=float)
        result = np.zeros_like(m)
        mask = m > 1
        result[mask] = 2.0 * (np.log(m[mask] - 1.0) + EULER_GAMMA) - 2.0 * (m[mask] - 1.0) / m[mask]
        return result

    def fit(
        self,
        vectors: FeatureInput,
        seed: int = 0,
        num_trees: Optional[int] = None,
        subsample_size: Optional[int] = None,
    ) -> IsolationForestModel:
        """
        Fit an Isolation Forest

        Args:
            vectors: Feature vectors or an n x d matrix
            seed: Seed of the numpy generator driving every random choice
            num_trees: Number of isolation trees; defaults to the service's
            subsample_size: Points per tree, drawn without replacement;
                defaults to min(max_samples, n) and is clamped to n

        Returns:
            IsolationForestModel

        Raises:
            EmptyFitSetError: when there are no vectors
        """
        X = self.as_matrix(vectors)
        n = X.shape[0]
        if n == 0:
            raise EmptyFitSetError()
        num_trees = self.num_trees if num_trees is None else num_trees
        if num_trees < 1:
            raise ValueError("num_trees must be at least 1")

        if subsample_size is None:
            subsample_size = min(self.max_samples, n)
        elif subsample_size < 1:
            raise ValueError("subsample_size must be at least 1")
        elif subsample_size > n:
            logger.warning(f"subsample_size {subsample_size} exceeds {n} points, using {n}")
            subsample_size = n

        height_limit = int(math.ceil(math.log2(subsample_size))) if subsample_size > 1 else 0
        rng = np.random.default_rng(seed)

        # each tree sees its own without-replacement subsample
        samples = rng.permuted(np.tile(np.arange(n), (num_trees, 1)), axis=1)[:, :subsample_size]
        arrays = self._grow_forest(X, samples, height_limit, rng)

        logger.debug(
            f"Fitted isolation forest: {num_trees} trees, subsample {subsample_size}, "
            f"{arrays['feature'].size} nodes"
        )
        return IsolationForestModel(
            num_trees=num_trees,
            subsample_size=subsample_size,
            seed=seed,
            height_limit=height_limit,
            **arrays,
        )

    def path_lengths(self, model: IsolationForestModel, X: np.ndarray) -> np.ndarray:
        """
        Path length of every point in every tree, leaf adjustment included

        Returns:
            num_trees x q matrix
        """
        X = np.atleast_2d(np.asarray(X, dtype=float))
        q = X.shape[0]
        current = np.repeat(model.roots[:, None], q, axis=1)
        columns = np.broadcast_to(np.arange(q), current.shape)
        # walk every (tree, point) pair down one level per pass
        while True:
            features = model.feature[current]
            internal = features >= 0
            if not internal.any():
                break
            nodes = current[internal]
            go_left = X[columns[internal], features[internal]] < model.threshold[nodes]
            current[internal] = np.where(go_left, model.left[nodes], model.right[nodes])
        return model.depth[current] + self.average_path_length(model.size[current])

    def score_samples(self, model: IsolationForestModel, vectors: FeatureInput) -> np.ndarray:
        """
        Anomaly scores s = 2^(-E[h] / c(subsample_size)); higher is more isolated

        A forest fitted on a single point scores everything 0.5.
        """
        X = self.as_matrix(vectors)
        if X.shape[0] == 0:
            return np.zeros(0)
        normaliser = float(self.average_path_length(model.subsample_size))
        if normaliser == 0.0:
            return np.full(X.shape[0], 0.5)
        mean_path = self.path_lengths(model, X).mean(axis=0)
        return np.power(2.0, -mean_path / normaliser)

    def anomaly_score(self, model: IsolationForestModel, v: Union[FeatureVector, np.ndarray]) -> float:
        """Anomaly score of a single vector"""
        row = v.to_array() if isinstance(v, FeatureVector) else np.asarray(v, dtype=float)
        return float(self.score_samples(model, row.reshape(1, -1))[0])

    def as_matrix(self, vectors: FeatureInput) -> np.ndarray:
        if isinstance(vectors, np.ndarray):
            return np.atleast_2d(vectors).astype(float, copy=False)
        return self.features.to_matrix(list(vectors))

    @staticmethod
    def _grow_forest(
        X: np.ndarray, samples: np.ndarray, height_limit: int, rng: np.random.Generator
    ) -> Dict[str, np.ndarray]:
        """Grow every tree level by level; returns the node arrays"""
        num_trees, psi = samples.shape
        capacity = num_trees * (2 * psi - 1)

        feature = np.full(capacity, LEAF, dtype=np.int64)
        threshold = np.zeros(capacity)
        left = np.full(capacity, LEAF, dtype=np.int64)
        right = np.full(capacity, LEAF, dtype=np.int64)
        size = np.zeros(capacity, dtype=np.int64)
        depth = np.zeros(capacity, dtype=np.int64)
        node_tree = np.zeros(capacity, dtype=np.int64)
        split_low = np.full(capacity, np.nan)
        split_high = np.full(capacity, np.nan)

        roots = np.arange(num_trees)
        size[roots] = psi
        node_tree[roots] = roots
        next_id = num_trees

        values = X[samples.ravel()]
        point_node = np.repeat(roots, psi)

        open_mask = np.zeros(capacity, dtype=bool)
        if psi > 1 and height_limit > 0:
            open_mask[roots] = True
        level = 0

        while open_mask.any():
            # points of open nodes, grouped node by node
            pts = np.flatnonzero(open_mask[point_node])
            pts = pts[np.argsort(point_node[pts], kind="stable")]
            nodes_sorted = point_node[pts]
            starts = np.flatnonzero(np.r_[True, nodes_sorted[1:] != nodes_sorted[:-1]])
            nodes = nodes_sorted[starts]

            # per-node min and max of every feature
            block = values[pts]
            mins = np.minimum.reduceat(block, starts, axis=0)
            maxs = np.maximum.reduceat(block, starts, axis=0)
            varying = maxs > mins
            n_varying = varying.sum(axis=1)

            # one feature draw and one threshold draw per open node, in node order
            u_feature = rng.random(nodes.size)
            u_threshold = rng.random(nodes.size)

            splittable = n_varying > 0
            choice = np.minimum((u_feature * n_varying).astype(np.int64), np.maximum(n_varying - 1, 0))
            feat = np.argmax(varying.cumsum(axis=1) > choice[:, None], axis=1)
            rows = np.arange(nodes.size)
            lo = mins[rows, feat]
            hi = maxs[rows, feat]
            thr = lo + u_threshold * (hi - lo)
            thr = np.where((thr <= lo) | (thr >= hi), (lo + hi) / 2.0, thr)

            open_mask[:] = False
            if not splittable.any():
                break

            split_nodes = nodes[splittable]
            k = split_nodes.size
            lefts = next_id + 2 * np.arange(k)
            rights = lefts + 1
            next_id += 2 * k

            feature[split_nodes] = feat[splittable]
            threshold[split_nodes] = thr[splittable]
            split_low[split_nodes] = lo[splittable]
            split_high[split_nodes] = hi[splittable]
            left[split_nodes] = lefts
            right[split_nodes] = rights

            # route the points of split nodes to their children
            pos = np.searchsorted(nodes, nodes_sorted)
            moving_mask = splittable[pos]
            moving = pts[moving_mask]
            moving_pos = pos[moving_mask]
            split_index = np.cumsum(splittable) - 1
            go_left = values[moving, feat[moving_pos]] < thr[moving_pos]
            child_left = lefts[split_index[moving_pos]]
            point_node[moving] = np.where(go_left, child_left, child_left + 1)

            children = np.concatenate([lefts, rights])
            size[children] = np.bincount(point_node[moving], minlength=next_id)[children]
            node_tree[lefts] = node_tree[split_nodes]
            node_tree[rights] = node_tree[split_nodes]
            level += 1
            depth[children] = level

            if level < height_limit:
                open_mask[children[size[children] > 1]] = True

        return dict(
            roots=roots,
            node_tree=node_tree[:next_id],
            feature=feature[:next_id],
            threshold=threshold[:next_id],
            left=left[:next_id],
            right=right[:next_id],
            size=size[:next_id],
            depth=depth[:next_id],
            split_low=split_low[:next_id],
            split_high=split_high[:next_id],
        )


isolation_forest_service = IsolationForestService()


def fit(
    vectors: FeatureInput,
    num_trees: int = DEFAULT_NUM_TREES,
    subsample_size: Optional[int] = None,
    seed: int = 0,
) -> IsolationForestModel:
    return isolation_forest_service.fit(vectors, seed=seed, num_trees=num_trees, subsample_size=subsample_size)


def anomaly_score(model: IsolationForestModel, v: Union[FeatureVector, np.ndarray]) -> float:
    return isolation_forest_service.anomaly_score(model, v)
