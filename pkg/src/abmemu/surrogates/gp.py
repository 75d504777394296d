"""Gaussian process regression with an ARD squared-exponential kernel.

Features are z-scored on training statistics and the target is
z-scored internally, so kernel hyperparameters live on a sensible
scale. Hyperparameters (per-dimension lengthscales, signal variance,
nugget) maximise the log marginal likelihood by Adam ascent in log
space from a few deterministic starts. Posterior quantities are
returned in natural target units.
"""

import numpy as np

from ..errors import DataError, NumericalError
from .base import TargetScaler, TrainedModel, fit_feature_scaler

_LOG_BOUNDS_LOW = np.array([-5.0, -8.0, -23.0])   # lengthscale, signal, nugget
_LOG_BOUNDS_HIGH = np.array([8.0, 8.0, 5.0])


def _pairwise_sq_diffs(Z):
    """Per-dimension squared differences, one n x n slab per feature."""
    return (Z[:, None, :] - Z[None, :, :]) ** 2


def _kernel_from_sqd(sqd, lengthscales, signal_var):
    scaled = sqd / (lengthscales ** 2)
    return signal_var * np.exp(-0.5 * scaled.sum(axis=2))


def _chol_with_jitter(K_noisy):
    jitter = 0.0
    scale = float(np.mean(np.diag(K_noisy)))
    for attempt in range(8):
        try:
            L = np.linalg.cholesky(
                K_noisy + jitter * np.eye(K_noisy.shape[0]))
            return L, jitter
        except np.linalg.LinAlgError:
            jitter = scale * 10.0 ** (attempt - 10)
    raise NumericalError(
        "kernel matrix is not positive definite even after jitter "
        "escalation (last jitter %.3g)" % jitter)


def _lml_from_sqd(sqd, r, theta):
    n, _, d = sqd.shape
    theta = np.asarray(theta, dtype=float)
    lengthscales = np.exp(theta[:d])
    signal_var = np.exp(theta[d])
    nugget = np.exp(theta[d + 1])
    K_se = _kernel_from_sqd(sqd, lengthscales, signal_var)
    K_noisy = K_se + nugget * np.eye(n)
    L, _ = _chol_with_jitter(K_noisy)
    alpha = np.linalg.solve(L.T, np.linalg.solve(L, r))
    lml = (-0.5 * float(r @ alpha)
           - float(np.log(np.diag(L)).sum())
           - 0.5 * n * np.log(2.0 * np.pi))
    K_inv = np.linalg.solve(L.T, np.linalg.solve(L, np.eye(n)))
    outer = np.outer(alpha, alpha) - K_inv
    grad = np.empty(d + 2)
    for k in range(d):
        dK = K_se * (sqd[:, :, k] / lengthscales[k] ** 2)
        grad[k] = 0.5 * float(np.sum(outer * dK))
    grad[d] = 0.5 * float(np.sum(outer * K_se))
    grad[d + 1] = 0.5 * nugget * float(np.trace(outer))
    return lml, grad


def gp_log_marginal(Z, r, theta):
    """Log marginal likelihood and its gradient in log-hyperparameters.

    theta = (log lengthscale_1..d, log signal variance, log nugget);
    Z is the standardized feature matrix and r the centred target.
    Used by the optimiser and directly by finite-difference checks.
    """
    Z = np.asarray(Z, dtype=float)
    r = np.asarray(r, dtype=float).ravel()
    return _lml_from_sqd(_pairwise_sq_diffs(Z), r, theta)


def _optimize_theta(sqd, r, theta0, max_iter, learning_rate):
    d = sqd.shape[2]
    low = np.concatenate([np.full(d, _LOG_BOUNDS_LOW[0]), _LOG_BOUNDS_LOW[1:]])
    high = np.concatenate([np.full(d, _LOG_BOUNDS_HIGH[0]), _LOG_BOUNDS_HIGH[1:]])
    theta = np.clip(theta0, low, high)
    m = np.zeros_like(theta)
    v = np.zeros_like(theta)
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    best_theta, best_lml = theta.copy(), -np.inf
    for t in range(1, max_iter + 1):
        lml, grad = _lml_from_sqd(sqd, r, theta)
        if lml > best_lml:
            best_lml, best_theta = lml, theta.copy()
        m = beta1 * m + (1 - beta1) * grad
        v = beta2 * v + (1 - beta2) * grad ** 2
        m_hat = m / (1 - beta1 ** t)
        v_hat = v / (1 - beta2 ** t)
        theta = np.clip(theta + learning_rate * m_hat / (np.sqrt(v_hat) + eps),
                        low, high)
    lml, _ = _lml_from_sqd(sqd, r, theta)
    if lml > best_lml:
        best_lml, best_theta = lml, theta
    return best_theta, best_lml


class GpModel(TrainedModel):
    kind = "gp"

    def __init__(self, scaler, dim, trainingX, lengthscales, signal_var,
                 nugget_var, mean_const, chol_factor, alpha, target_scaler,
                 log_marginal):
        super().__init__(scaler, dim)
        self.trainingX = trainingX
        self.lengthscales = lengthscales
        self._signal_var = signal_var    # scaled-target units
        self._nugget_var = nugget_var    # scaled-target units
        self.meanConstant = mean_const   # scaled-target units
        self.cholFactor = chol_factor
        self.alphaWeights = alpha
        self.targetScaler = target_scaler
        self.logMarginal = log_marginal

    @property
    def signalVariance(self):
        """Signal variance in natural target units."""
        return self._signal_var * self.targetScaler.std ** 2

    @property
    def nugget(self):
        """Nugget variance in natural target units."""
        return self._nugget_var * self.targetScaler.std ** 2

    def kernel_matrix(self):
        """K + nugget*I over the training inputs (scaled-target units);
        cholFactor @ cholFactor.T reproduces this matrix."""
        sqd = _pairwise_sq_diffs(self.trainingX)
        K = _kernel_from_sqd(sqd, self.lengthscales, self._signal_var)
        return K + self._nugget_var * np.eye(self.trainingX.shape[0])

    def _cross_kernel(self, Z):
        diff = (Z[:, None, :] - self.trainingX[None, :, :]) / self.lengthscales
        return self._signal_var * np.exp(-0.5 * np.sum(diff * diff, axis=2))

    def posterior(self, X):
        """Predictive mean and variance (natural units) for a batch."""
        Z = self._check_inputs(X)
        means = np.empty(Z.shape[0])
        variances = np.empty(Z.shape[0])
        for start in range(0, Z.shape[0], 1024):
            block = Z[start:start + 1024]
            K_star = self._cross_kernel(block)
            mean_scaled = self.meanConstant + K_star @ self.alphaWeights
            v = np.linalg.solve(self.cholFactor, K_star.T)
            var_scaled = np.maximum(
                self._signal_var + self._nugget_var - np.sum(v * v, axis=0),
                0.0)
            means[start:start + 1024] = mean_scaled
            variances[start:start + 1024] = var_scaled
        std2 = self.targetScaler.std ** 2
        return self.targetScaler.inverse(means), variances * std2

    def predict(self, X):
        return self.posterior(X)[0]


def fit_gp(train, nugget=1e-6, n_restarts=3, optimize=True, max_iter=200,
           learning_rate=0.1, lengthscale0=1.0, max_n=2000):
    """Constant-mean GP fit by marginal-likelihood ascent.

    Restart i starts all lengthscales at lengthscale0 * 3**e with
    e = 0, -1, +1, -2, +2, ...; the best final likelihood wins. With
    optimize=False the kernel keeps the given initial values, which is
    how fixed-hyperparameter models are built.
    """
    if train.n > max_n:
        raise DataError(
            "GP training is cubic in n; %d rows exceed the %d cap"
            % (train.n, max_n))
    if nugget <= 0:
        raise DataError("nugget must be positive")
    scaler, Z = fit_feature_scaler(train)
    target_scaler = TargetScaler.fit(train.y)
    t = target_scaler.transform(train.y)
    mean_const = float(t.mean())
    r = t - mean_const
    d = train.dim
    signal0 = float(r.var(ddof=1)) if train.n > 1 and r.var(ddof=1) > 0 else 1.0

    def restart_theta(i):
        exponent = (i + 1) // 2 * (1 if i % 2 == 0 else -1)
        if i == 0:
            exponent = 0
        ls = lengthscale0 * 3.0 ** exponent
        return np.concatenate([
            np.full(d, np.log(ls)),
            [np.log(signal0), np.log(nugget)],
        ])

    sqd = _pairwise_sq_diffs(Z)
    if optimize:
        if n_restarts < 1:
            raise DataError("n_restarts must be >= 1")
        best_theta, best_lml = None, -np.inf
        for i in range(n_restarts):
            theta, lml = _optimize_theta(sqd, r, restart_theta(i),
                                         max_iter, learning_rate)
            if lml > best_lml:
                best_theta, best_lml = theta, lml
    else:
        best_theta = restart_theta(0)
        best_lml, _ = _lml_from_sqd(sqd, r, best_theta)

    lengthscales = np.exp(best_theta[:d])
    signal_var = float(np.exp(best_theta[d]))
    nugget_var = float(np.exp(best_theta[d + 1]))
    K_noisy = (_kernel_from_sqd(sqd, lengthscales, signal_var)
               + nugget_var * np.eye(train.n))
    L, jitter = _chol_with_jitter(K_noisy)
    if jitter:
        nugget_var += jitter
    alpha = np.linalg.solve(L.T, np.linalg.solve(L, r))
    return GpModel(scaler, d, Z, lengthscales, signal_var, nugget_var,
                   mean_const, L, alpha, target_scaler, float(best_lml))


def gp_posterior(model, x):
    """Predictive mean and variance at one input point."""
    if not isinstance(model, GpModel):
        raise DataError("gp_posterior needs a fitted GP model")
    x = np.asarray(x, dtype=float).ravel()
    means, variances = model.posterior(x[None, :])
    return float(means[0]), float(variances[0])
