"""Bootstrap-aggregated CART trees with per-split feature subsets."""

import numpy as np

from ..errors import DataError
from .base import TrainedModel, fit_feature_scaler
from .tree import build_tree_arrays, tree_predict_arrays


class ForestModel(TrainedModel):
    kind = "forest"

    def __init__(self, scaler, dim, trees, feature_subset_size, seed):
        super().__init__(scaler, dim)
        self.trees = trees
        self.featureSubsetSize = feature_subset_size
        self.seed = seed

    def predict(self, X):
        Z = self._check_inputs(X)
        total = np.zeros(Z.shape[0])
        for arrays in self.trees:
            total += tree_predict_arrays(arrays, Z)
        return total / len(self.trees)


def fit_random_forest(train, n_trees=200, min_leaf=5, max_depth=12,
                      bootstrap=True, feature_subset_size=None, seed=0):
    """Average of n_trees CART trees on bootstrap resamples.

    Each split draws a random subset of max(1, d // 3) features unless
    feature_subset_size says otherwise. Per-tree generators derive
    from (seed, tree index), so refits reproduce the forest exactly.
    """
    if n_trees < 1:
        raise DataError("n_trees must be >= 1")
    scaler, Z = fit_feature_scaler(train)
    d = train.dim
    mtry = feature_subset_size if feature_subset_size else max(1, d // 3)
    trees = []
    for t in range(n_trees):
        rng = np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, t])
        if bootstrap:
            rows = rng.integers(0, train.n, size=train.n)
        else:
            rows = np.arange(train.n)
        trees.append(build_tree_arrays(
            Z[rows], train.y[rows], min_leaf, max_depth,
            mtry=mtry, rng=rng))
    return ForestModel(scaler, d, trees, mtry, int(seed))
