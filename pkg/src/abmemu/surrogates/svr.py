"""Epsilon-insensitive support vector regression via SMO.

The dual is solved over the stacked variables z = (alpha, alpha*),
each in [0, C], with the single equality constraint sum(alpha) =
sum(alpha*). Working pairs are chosen by maximal violation, the
textbook stopping rule for decomposition methods, to a KKT tolerance
of 1e-3. Both targets and features are z-scored internally so C and
epsilon act on a dimensionless problem.
"""

import warnings

import numpy as np

from ..errors import DataError
from .base import TargetScaler, TrainedModel, fit_feature_scaler

KKT_TOL = 1e-3


def _kernel(kind, gamma, A, B):
    if kind == "linear":
        return A @ B.T
    if kind == "rbf":
        sq = (np.sum(A ** 2, axis=1)[:, None]
              + np.sum(B ** 2, axis=1)[None, :]
              - 2.0 * A @ B.T)
        return np.exp(-gamma * np.maximum(sq, 0.0))
    raise DataError("unknown kernel %r (use linear or rbf)" % kind)


def _smo(K, y, C, epsilon, max_iter):
    """Maximal-violating-pair SMO on the stacked dual.

    Returns (beta, bias, iterations, final KKT violation) where
    beta = alpha - alpha*.
    """
    n = K.shape[0]
    u = np.concatenate([np.ones(n), -np.ones(n)])
    q = np.concatenate([epsilon - y, epsilon + y])
    z = np.zeros(2 * n)
    G = q.copy()  # gradient of the dual objective at z = 0
    diag = np.concatenate([np.diag(K), np.diag(K)])

    def step_column(i):
        # u_i * Q[:, i]; the u_i^2 factor collapses to u * K column
        col = K[:, i % n]
        return u * np.concatenate([col, col])

    violation = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        minus_uG = -u * G
        up = np.where(u > 0, z < C, z > 0)
        low = np.where(u > 0, z > 0, z < C)
        if not up.any() or not low.any():
            violation = 0.0
            break
        i = int(np.flatnonzero(up)[np.argmax(minus_uG[up])])
        j = int(np.flatnonzero(low)[np.argmin(minus_uG[low])])
        violation = minus_uG[i] - minus_uG[j]
        if violation <= KKT_TOL:
            break
        # curvature along the feasible direction: the u signs cancel,
        # Q_ii + Q_jj - 2 u_i u_j Q_ij = K_ii + K_jj - 2 K_ij
        a = diag[i] + diag[j] - 2.0 * K[i % n, j % n]
        a = max(a, 1e-12)
        b = u[i] * G[i] - u[j] * G[j]
        t = -b / a
        # box limits: z_i + u_i t in [0, C] and z_j - u_j t in [0, C]
        if u[i] > 0:
            t_lo, t_hi = -z[i], C - z[i]
        else:
            t_lo, t_hi = z[i] - C, z[i]
        if u[j] > 0:
            t_lo, t_hi = max(t_lo, z[j] - C), min(t_hi, z[j])
        else:
            t_lo, t_hi = max(t_lo, -z[j]), min(t_hi, C - z[j])
        t = min(max(t, t_lo), t_hi)
        if t == 0.0:
            break
        z[i] += u[i] * t
        z[j] -= u[j] * t
        G += t * (step_column(i) - step_column(j))

    free = (z > 1e-9) & (z < C - 1e-9)
    minus_uG = -u * G
    if free.any():
        bias = float(minus_uG[free].mean())
    else:
        up = np.where(u > 0, z < C, z > 0)
        low = np.where(u > 0, z > 0, z < C)
        hi = minus_uG[up].max() if up.any() else 0.0
        lo = minus_uG[low].min() if low.any() else 0.0
        bias = float(0.5 * (hi + lo))
    beta = z[:n] - z[n:]
    return beta, z, bias, it, float(max(violation, 0.0))


class SvrModel(TrainedModel):
    kind = "svr"

    def __init__(self, scaler, dim, kernel, gamma, support_vectors,
                 dual_coefficients, bias, epsilon, C, target_scaler,
                 converged, kkt_violation, train_values):
        super().__init__(scaler, dim)
        self.kernel = kernel
        self.gamma = gamma
        self.supportVectors = support_vectors
        self.dualCoefficients = dual_coefficients
        self.bias = bias
        self.epsilon = epsilon
        self.C = C
        self.targetScaler = target_scaler
        self.converged = converged
        self.kktViolation = kkt_violation
        # scaled training data kept for objective-value verification
        self._train_values = train_values

    def predict(self, X):
        Z = self._check_inputs(X)
        K = _kernel(self.kernel, self.gamma, Z, self.supportVectors)
        return self.targetScaler.inverse(K @ self.dualCoefficients + self.bias)

    def dual_objective(self):
        """Dual objective at the solver's final (alpha, alpha*) point,
        over the internally scaled training problem."""
        if self._train_values is None:
            raise DataError("training state not kept; objective unavailable")
        Zt, yt, beta, z = self._train_values
        K = _kernel(self.kernel, self.gamma, Zt, Zt)
        return float(0.5 * beta @ K @ beta
                     + self.epsilon * z.sum()
                     - yt @ beta)


def fit_svr(train, kernel="rbf", C=10.0, epsilon=0.1, gamma=None,
            max_iter=200000):
    """SMO fit of an epsilon-SVR with a linear or RBF kernel.

    gamma defaults to 1/d. Hitting the iteration cap leaves a usable
    model flagged converged=False with the achieved KKT violation.
    """
    if C <= 0:
        raise DataError("C must be positive")
    if epsilon < 0:
        raise DataError("epsilon must be >= 0")
    scaler, Z = fit_feature_scaler(train)
    target_scaler = TargetScaler.fit(train.y)
    y = target_scaler.transform(train.y)
    g = (1.0 / train.dim) if gamma is None else float(gamma)
    K = _kernel(kernel, g, Z, Z)
    beta, z, bias, iters, violation = _smo(K, y, C, epsilon, max_iter)
    converged = violation <= KKT_TOL
    if not converged:
        warnings.warn(
            "SVR did not reach the KKT tolerance within %d iterations "
            "(violation %.3g)" % (max_iter, violation))
    keep = np.abs(beta) > 1e-12
    if not keep.any():
        keep = np.zeros_like(keep)
        keep[0] = True  # degenerate flat fit: keep one vector for shape
    return SvrModel(scaler, train.dim, kernel, g, Z[keep], beta[keep],
                    bias, epsilon, C, target_scaler, converged, violation,
                    (Z, y, beta, z))
