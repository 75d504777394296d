"""Ordinary least squares on standardized features."""

import warnings

import numpy as np

from .base import TrainedModel, fit_feature_scaler


class LinearModel(TrainedModel):
    kind = "linear"

    def __init__(self, scaler, dim, weights, intercept, rank_deficient):
        super().__init__(scaler, dim)
        self.weights = weights          # slopes in standardized units
        self.interceptStd = intercept   # intercept in standardized units
        self.rankDeficient = rank_deficient

    @property
    def coefficients(self):
        """Slopes in natural feature units."""
        return self.weights / self.scaler.std

    @property
    def intercept(self):
        """Intercept in natural feature units."""
        return float(self.interceptStd
                     - np.sum(self.weights * self.scaler.mean / self.scaler.std))

    def predict(self, X):
        Z = self._check_inputs(X)
        return Z @ self.weights + self.interceptStd


def fit_linear(train):
    """Least squares by singular value decomposition.

    A rank-deficient design keeps the minimum-norm solution and flags
    the model (rankDeficient) with a warning.
    """
    scaler, Z = fit_feature_scaler(train)
    A = np.hstack([Z, np.ones((train.n, 1))])
    solution, _, rank, _ = np.linalg.lstsq(A, train.y, rcond=None)
    deficient = rank < A.shape[1]
    if deficient:
        warnings.warn("rank-deficient design; returning the minimum-norm fit")
    return LinearModel(scaler, train.dim, solution[:-1], float(solution[-1]),
                       deficient)
