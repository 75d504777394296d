"""CART regression trees.

Greedy variance-reduction splits on midpoints between consecutive
distinct sorted feature values. Nodes live in flat arrays so batch
prediction is a vectorized descent. The same builder serves the
standalone tree, the random forest (with per-split feature subsets)
and the boosting stages.
"""

import numpy as np

from ..errors import DataError
from .base import TrainedModel, fit_feature_scaler

_LEAF = -1
_NO_DEPTH_LIMIT = np.iinfo(np.int64).max


class _TreeBuilder:
    def __init__(self, X, y, min_leaf, max_depth, mtry=None, rng=None):
        self.X = X
        self.y = y
        self.min_leaf = min_leaf
        self.max_depth = max_depth if max_depth is not None else _NO_DEPTH_LIMIT
        d = X.shape[1]
        self.mtry = d if mtry is None else min(mtry, d)
        self.rng = rng
        self.feature = []
        self.threshold = []
        self.left = []
        self.right = []
        self.value = []

    def _new_node(self):
        self.feature.append(_LEAF)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(0.0)
        return len(self.feature) - 1

    def _candidate_features(self):
        d = self.X.shape[1]
        if self.mtry >= d:
            return np.arange(d)
        return np.sort(self.rng.choice(d, size=self.mtry, replace=False))

    def _best_split(self, rows):
        """Split with the largest sum-of-squared-error reduction.

        Ties resolve to the lowest feature index, then the lowest
        threshold, so the tree is a deterministic function of the data.
        """
        y = self.y[rows]
        n = rows.size
        total_sum = y.sum()
        best = (0.0, -1, 0.0)  # (reduction, feature, threshold)
        for f in self._candidate_features():
            x = self.X[rows, f]
            order = np.argsort(x, kind="stable")
            xs = x[order]
            ys = y[order]
            distinct = np.flatnonzero(xs[1:] > xs[:-1]) + 1  # left-side sizes
            if distinct.size == 0:
                continue
            valid = distinct[(distinct >= self.min_leaf)
                             & (n - distinct >= self.min_leaf)]
            if valid.size == 0:
                continue
            csum = np.cumsum(ys)
            left_sum = csum[valid - 1]
            right_sum = total_sum - left_sum
            # SSE reduction = sum_left^2/n_left + sum_right^2/n_right - sum^2/n
            reduction = (left_sum ** 2 / valid
                         + right_sum ** 2 / (n - valid)
                         - total_sum ** 2 / n)
            k = int(np.argmax(reduction))
            if reduction[k] > best[0]:
                thr = 0.5 * (xs[valid[k] - 1] + xs[valid[k]])
                best = (float(reduction[k]), int(f), float(thr))
        return best

    def build(self, rows, depth=0):
        node = self._new_node()
        y = self.y[rows]
        self.value[node] = float(y.mean())
        if depth >= self.max_depth or rows.size < 2 * self.min_leaf:
            return node
        reduction, f, thr = self._best_split(rows)
        if f < 0 or reduction <= 0.0:
            return node
        go_left = self.X[rows, f] <= thr
        self.feature[node] = f
        self.threshold[node] = thr
        self.left[node] = self.build(rows[go_left], depth + 1)
        self.right[node] = self.build(rows[~go_left], depth + 1)
        return node

    def arrays(self):
        return (np.array(self.feature, dtype=np.int64),
                np.array(self.threshold, dtype=float),
                np.array(self.left, dtype=np.int64),
                np.array(self.right, dtype=np.int64),
                np.array(self.value, dtype=float))


def build_tree_arrays(X, y, min_leaf, max_depth, mtry=None, rng=None):
    """Grow one tree on (already standardized) data; returns flat arrays."""
    builder = _TreeBuilder(X, y, min_leaf, max_depth, mtry=mtry, rng=rng)
    builder.build(np.arange(X.shape[0]))
    return builder.arrays()


def tree_predict_arrays(arrays, Z):
    """Vectorized descent of a flat-array tree for a standardized batch."""
    feature, threshold, left, right, value = arrays
    node = np.zeros(Z.shape[0], dtype=np.int64)
    while True:
        internal = feature[node] >= 0
        if not internal.any():
            break
        rows = np.flatnonzero(internal)
        f = feature[node[rows]]
        go_left = Z[rows, f] <= threshold[node[rows]]
        node[rows] = np.where(go_left, left[node[rows]], right[node[rows]])
    return value[node]


class TreeModel(TrainedModel):
    kind = "tree"

    def __init__(self, scaler, dim, arrays, min_leaf, max_depth):
        super().__init__(scaler, dim)
        self.arrays = arrays
        self.minLeaf = min_leaf
        self.maxDepth = max_depth

    @property
    def node_count(self):
        return self.arrays[0].size

    def predict(self, X):
        Z = self._check_inputs(X)
        return tree_predict_arrays(self.arrays, Z)


def fit_decision_tree(train, min_leaf=5, max_depth=12):
    """Greedy CART regression tree on standardized features."""
    if min_leaf < 1:
        raise DataError("min_leaf must be >= 1")
    if train.n < 2 * min_leaf and max_depth != 0:
        raise DataError("need at least 2*min_leaf rows")
    scaler, Z = fit_feature_scaler(train)
    arrays = build_tree_arrays(Z, train.y, min_leaf, max_depth)
    return TreeModel(scaler, train.dim, arrays, min_leaf, max_depth)
