"""Splits, normalisation, loss, PCA, and surrogate-based sensitivity.

These are the pieces shared by every experiment: the fixed
20/20-of-rest/rest split, z-scoring with the sample standard
deviation, mean squared error, correlation-matrix PCA with the usual
retention rules, Monte Carlo main effects for any trained surrogate,
and the log-scaled mapping of method scores onto [0, 1].
"""

from dataclasses import dataclass

import numpy as np

from .errors import DataError, DegenerateFeatureError


def _round_half_up(x):
    return int(np.floor(x + 0.5))


@dataclass(frozen=True)
class SplitIndices:
    trainIdx: np.ndarray
    valIdx: np.ndarray
    testIdx: np.ndarray

    def __post_init__(self):
        n = self.trainIdx.size + self.valIdx.size + self.testIdx.size
        combined = np.concatenate([self.trainIdx, self.valIdx, self.testIdx])
        if np.unique(combined).size != n:
            raise DataError("split index sets overlap or repeat")


def split_dataset(n, seed):
    """Shuffle 0..n-1 and split: 20% test, 20% of the rest validation.

    Both fractions round half up, so n=200 gives 40 test, 32
    validation and 128 training rows.
    """
    if n < 5:
        raise DataError("need at least 5 rows to split")
    n_test = _round_half_up(0.2 * n)
    n_val = _round_half_up(0.2 * (n - n_test))
    rng = np.random.default_rng(int(seed) & 0xFFFFFFFFFFFFFFFF)
    perm = rng.permutation(n)
    return SplitIndices(
        trainIdx=perm[n_test + n_val:],
        valIdx=perm[n_test:n_test + n_val],
        testIdx=perm[:n_test],
    )


@dataclass(frozen=True)
class Standardizer:
    """Per-column z-score transform fitted on some reference data."""

    mean: np.ndarray
    std: np.ndarray

    def transform(self, data):
        return (np.asarray(data, dtype=float) - self.mean) / self.std

    def inverse(self, data):
        return np.asarray(data, dtype=float) * self.std + self.mean


def standardize(data):
    """Fit a z-score on the columns of data; returns (Standardizer, z).

    Uses the sample (n-1) standard deviation. A constant column has no
    scale and is rejected.
    """
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.shape[0] < 2:
        raise DataError("need at least 2 rows to standardize")
    mean = arr.mean(axis=0)
    std = arr.std(axis=0, ddof=1)
    if np.any(std == 0) or not np.all(np.isfinite(std)):
        bad = np.flatnonzero(~(std > 0))
        raise DegenerateFeatureError(
            "column(s) %s are constant and cannot be standardized"
            % bad.tolist())
    scaler = Standardizer(mean=mean, std=std)
    return scaler, scaler.transform(arr)


def mse(actual, predicted):
    """Mean of the squared differences between two equal-length vectors."""
    a = np.asarray(actual, dtype=float).ravel()
    p = np.asarray(predicted, dtype=float).ravel()
    if a.size != p.size:
        raise DataError("length mismatch: %d vs %d" % (a.size, p.size))
    if a.size == 0:
        raise DataError("mse needs at least one pair")
    d = a - p
    return float(np.mean(d * d))


@dataclass(frozen=True)
class PcaResult:
    """Correlation-matrix PCA output.

    eigenvalues descend; loadings columns are the orthonormal
    eigenvectors; scores are the z-scored data projected onto them.
    cumulativeVarianceFraction[k] is the variance share of the first
    k+1 components.
    """

    eigenvalues: np.ndarray
    loadings: np.ndarray
    scores: np.ndarray
    retainedCount: int
    cumulativeVarianceFraction: np.ndarray


def _retention_rule(eigenvalues):
    eig = np.asarray(eigenvalues, dtype=float)
    total = eig.sum()
    kaiser = int(np.count_nonzero(eig > 1.0))
    cumulative = np.cumsum(eig) / total
    seventy = int(np.searchsorted(cumulative, 0.70 - 1e-12) + 1)
    return max(kaiser, seventy)


def pca_decompose(data):
    """Eigendecomposition of the correlation matrix of z-scored data.

    The sign of each loading column is fixed so its largest-magnitude
    entry is positive, which makes results reproducible across runs.
    """
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 2:
        raise DataError("pca needs a 2-D matrix")
    n, d = arr.shape
    if n <= d:
        raise DataError("pca needs more rows than columns (%d x %d)" % (n, d))
    _, z = standardize(arr)
    corr = (z.T @ z) / (n - 1)
    eigvals, eigvecs = np.linalg.eigh(corr)
    order = np.argsort(eigvals)[::-1]
    eigvals = np.clip(eigvals[order], 0.0, None)
    eigvecs = eigvecs[:, order]
    for j in range(d):
        pivot = np.argmax(np.abs(eigvecs[:, j]))
        if eigvecs[pivot, j] < 0:
            eigvecs[:, j] = -eigvecs[:, j]
    cumulative = np.cumsum(eigvals) / eigvals.sum()
    return PcaResult(
        eigenvalues=eigvals,
        loadings=eigvecs,
        scores=z @ eigvecs,
        retainedCount=_retention_rule(eigvals),
        cumulativeVarianceFraction=cumulative,
    )


def retained_components(result):
    """How many components to keep: the larger of the Kaiser count
    (eigenvalues above 1) and the smallest k explaining 70% of the
    variance. Accepts a PcaResult or a plain eigenvalue sequence."""
    eig = getattr(result, "eigenvalues", result)
    return _retention_rule(eig)


def significant_loadings(result, component):
    """Variables whose correlation with the component exceeds 0.5.

    The correlation between variable i and component j of a
    correlation-matrix PCA is loading[i, j] * sqrt(eigenvalue[j]).
    """
    d = result.loadings.shape[0]
    if not 0 <= component < d:
        raise DataError("component index out of range")
    lam = result.eigenvalues[component]
    corr = result.loadings[:, component] * np.sqrt(lam)
    return np.flatnonzero(np.abs(corr) > 0.5)


@dataclass(frozen=True)
class MainEffectCurve:
    parameterIndex: int
    parameterName: str
    gridValues: np.ndarray
    effectValues: np.ndarray
    overallMean: float
    overallVariance: float


def main_effects(model, ranges, grid_size=21, n_mc=1000, seed=0):
    """Monte Carlo main effects of each input under a trained surrogate.

    For parameter i and grid value g, the effect is the average
    prediction over n_mc points whose other coordinates are sampled
    uniformly in their ranges. The same seeded base sample is reused
    for every grid value (common random numbers), so curves are smooth
    in g and the only noise is the shared Monte Carlo error.

    Returns (curves, overallMean, overallVariance) where the overall
    numbers summarise predictions over the untouched base sample.
    """
    if grid_size < 2:
        raise DataError("grid_size must be at least 2")
    if n_mc < 100:
        raise DataError("n_mc must be at least 100")
    rng = np.random.default_rng(int(seed) & 0xFFFFFFFFFFFFFFFF)
    d = ranges.dim
    base = ranges.lower + rng.random((n_mc, d)) * (ranges.upper - ranges.lower)
    overall_pred = np.asarray(model.predict(base), dtype=float)
    overall_mean = float(overall_pred.mean())
    overall_var = float(overall_pred.var(ddof=1)) if n_mc > 1 else 0.0
    curves = []
    for i in range(d):
        grid = np.linspace(ranges.lower[i], ranges.upper[i], grid_size)
        effects = np.empty(grid_size)
        for gidx, g in enumerate(grid):
            pts = base.copy()
            pts[:, i] = g
            effects[gidx] = float(np.mean(model.predict(pts)))
        curves.append(MainEffectCurve(
            parameterIndex=i,
            parameterName=ranges.names[i],
            gridValues=grid,
            effectValues=effects,
            overallMean=overall_mean,
            overallVariance=overall_var,
        ))
    return curves, overall_mean, overall_var


def relative_scores(values, lower_is_better=True):
    """Map positive per-method values onto [0, 1] on a log scale.

    The best method scores 1 and the worst 0; when every value is
    equal they all score 1.
    """
    vals = np.asarray(values, dtype=float)
    if vals.size < 2:
        raise DataError("relative scores need at least 2 methods")
    if np.any(vals <= 0) or not np.all(np.isfinite(vals)):
        raise DataError("values must be positive and finite")
    logs = np.log(vals)
    span = logs.max() - logs.min()
    if span == 0:
        return np.ones_like(vals)
    if lower_is_better:
        return (logs.max() - logs) / span
    return (logs - logs.min()) / span
