"""Shared plumbing for the nine surrogate methods.

Every fit standardizes features on training statistics and stores the
scaler, so predictions accept inputs in natural parameter units.
Targets stay in natural units for the tree and neighbour families;
methods whose hyperparameters are scale-sensitive (GP, SVR, MLP)
z-score the target internally and undo the scaling when predicting.
"""

from dataclasses import dataclass, field

import numpy as np

from ..analysis import Standardizer, standardize
from ..errors import DataError


@dataclass(frozen=True)
class Dataset:
    """Feature matrix, target vector, and optional column names."""

    X: np.ndarray
    y: np.ndarray
    featureNames: tuple = None

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float).ravel()
        if X.ndim == 1:
            X = X[:, None]
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        if X.ndim != 2 or X.shape[0] != y.size:
            raise DataError("X and y row counts differ")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise DataError("dataset contains non-finite entries")
        if self.featureNames is not None:
            names = tuple(self.featureNames)
            if len(names) != X.shape[1]:
                raise DataError("featureNames length mismatch")
            object.__setattr__(self, "featureNames", names)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def dim(self):
        return self.X.shape[1]

    def subset(self, idx):
        names = self.featureNames
        return Dataset(self.X[idx], self.y[idx], names)


class TrainedModel:
    """Base class: a fitted surrogate with a stored feature scaler."""

    kind = "base"

    def __init__(self, scaler, dim):
        self.scaler = scaler
        self.dim = dim

    def _check_inputs(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        if X.ndim != 2 or X.shape[1] != self.dim:
            raise DataError(
                "expected inputs with %d features, got shape %r"
                % (self.dim, X.shape))
        if not np.all(np.isfinite(X)):
            raise DataError("prediction inputs contain non-finite entries")
        return self.scaler.transform(X)

    def predict(self, X):
        raise NotImplementedError


def predict(model, X):
    """Predict with any trained surrogate; pure in (model, X)."""
    if not isinstance(model, TrainedModel):
        raise DataError("not a trained surrogate: %r" % (model,))
    return model.predict(X)


def fit_feature_scaler(dataset):
    scaler, Z = standardize(dataset.X)
    return scaler, Z


@dataclass(frozen=True)
class TargetScaler:
    """z-score for targets; degenerate (constant) targets get scale 1."""

    mean: float
    std: float

    @classmethod
    def fit(cls, y):
        y = np.asarray(y, dtype=float)
        std = float(y.std(ddof=1)) if y.size > 1 else 0.0
        if std == 0 or not np.isfinite(std):
            std = 1.0
        return cls(mean=float(y.mean()), std=std)

    def transform(self, y):
        return (np.asarray(y, dtype=float) - self.mean) / self.std

    def inverse(self, z):
        return np.asarray(z, dtype=float) * self.std + self.mean
