"""K-nearest-neighbour regression on standardized features."""

import numpy as np

from ..errors import DataError
from .base import TrainedModel, fit_feature_scaler


class KnnModel(TrainedModel):
    kind = "knn"

    def __init__(self, scaler, dim, storedX, storedY, k):
        super().__init__(scaler, dim)
        self.storedX = storedX
        self.storedY = storedY
        self.k = k

    def predict(self, X):
        Z = self._check_inputs(X)
        out = np.empty(Z.shape[0])
        for start in range(0, Z.shape[0], 256):
            block = Z[start:start + 256]
            diff = block[:, None, :] - self.storedX[None, :, :]
            d2 = np.sum(diff * diff, axis=2)
            # stable argsort resolves distance ties to the lower row index
            nearest = np.argsort(d2, axis=1, kind="stable")[:, :self.k]
            out[start:start + 256] = self.storedY[nearest].mean(axis=1)
        return out


def fit_knn(train, k=5):
    """Store the standardized training set; predict by mean of the k
    nearest rows in Euclidean distance."""
    if not 1 <= k <= train.n:
        raise DataError("k must be in [1, %d]" % train.n)
    scaler, Z = fit_feature_scaler(train)
    return KnnModel(scaler, train.dim, Z, train.y.copy(), int(k))
