"""Gradient boosted regression trees, squared-error loss."""

import numpy as np

from ..errors import DataError
from .base import TrainedModel, fit_feature_scaler
from .tree import build_tree_arrays, tree_predict_arrays


class GbtModel(TrainedModel):
    kind = "gbt"

    def __init__(self, scaler, dim, base_value, stages, shrinkage,
                 train_loss_curve):
        super().__init__(scaler, dim)
        self.baseValue = base_value
        self.stages = stages
        self.shrinkage = shrinkage
        # training MSE after the base model and after each stage
        self.trainLossCurve = train_loss_curve

    def predict(self, X):
        Z = self._check_inputs(X)
        out = np.full(Z.shape[0], self.baseValue)
        for arrays in self.stages:
            out += self.shrinkage * tree_predict_arrays(arrays, Z)
        return out

    def staged_predict(self, X):
        """Predictions after the base model and after every stage."""
        Z = self._check_inputs(X)
        out = np.full(Z.shape[0], self.baseValue)
        yield out.copy()
        for arrays in self.stages:
            out += self.shrinkage * tree_predict_arrays(arrays, Z)
            yield out.copy()


def fit_gbt(train, n_stages=300, shrinkage=0.1, max_depth=3, min_leaf=1):
    """Stagewise fit: each tree learns the current residuals.

    The model starts at mean(y) and adds shrinkage * tree per stage;
    the recorded training-loss curve is non-increasing for any
    shrinkage in (0, 2).
    """
    if n_stages < 0:
        raise DataError("n_stages must be >= 0")
    if shrinkage <= 0:
        raise DataError("shrinkage must be positive")
    scaler, Z = fit_feature_scaler(train)
    base = float(train.y.mean())
    residual = train.y - base
    loss_curve = [float(np.mean(residual ** 2))]
    stages = []
    for _ in range(n_stages):
        arrays = build_tree_arrays(Z, residual, min_leaf, max_depth)
        residual = residual - shrinkage * tree_predict_arrays(arrays, Z)
        stages.append(arrays)
        loss_curve.append(float(np.mean(residual ** 2)))
    return GbtModel(scaler, train.dim, base, stages, shrinkage,
                    np.array(loss_curve))
