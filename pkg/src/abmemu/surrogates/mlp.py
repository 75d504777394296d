"""A small fully connected network trained with Adam.

Architecture: batch-norm and tanh on the inputs, H hidden layers of
width 50 with tanh, a second batch-norm plus tanh, then a linear
scalar head. The hidden-layer count is picked by a brief grid search
on validation MSE. Targets are z-scored internally. The L2 penalty
follows the weight-decay convention, (l2 / 2) * sum of squared dense
weights, and leaves biases and batch-norm parameters alone.

The loss/gradient pair is exposed as a pure function of (parameters,
batch) so finite-difference checks can probe it directly.
"""

import numpy as np

from ..errors import DataError, NumericalError
from .base import TargetScaler, TrainedModel, fit_feature_scaler

_BN_EPS = 1e-5
_BN_MOMENTUM = 0.1


def init_params(dim, hidden_layers, hidden_width, rng):
    """Xavier-uniform dense layers, unit-scale batch norms."""
    params = {}
    params["bn0_gamma"] = np.ones(dim)
    params["bn0_beta"] = np.zeros(dim)
    fan_in = dim
    for h in range(hidden_layers):
        limit = np.sqrt(6.0 / (fan_in + hidden_width))
        params["W%d" % h] = rng.uniform(-limit, limit, (fan_in, hidden_width))
        params["b%d" % h] = np.zeros(hidden_width)
        fan_in = hidden_width
    params["bn1_gamma"] = np.ones(fan_in)
    params["bn1_beta"] = np.zeros(fan_in)
    limit = np.sqrt(6.0 / (fan_in + 1))
    params["W_out"] = rng.uniform(-limit, limit, (fan_in, 1))
    params["b_out"] = np.zeros(1)
    return params


def init_running(dim, hidden_layers, hidden_width):
    width = hidden_width if hidden_layers else dim
    return {
        "bn0_mean": np.zeros(dim), "bn0_var": np.ones(dim),
        "bn1_mean": np.zeros(width), "bn1_var": np.ones(width),
    }


def _bn_forward(x, gamma, beta, mean, var):
    inv = 1.0 / np.sqrt(var + _BN_EPS)
    xhat = (x - mean) * inv
    return gamma * xhat + beta, (xhat, inv)


def _bn_backward(dout, x, gamma, cache):
    xhat, inv = cache
    B = x.shape[0]
    dgamma = np.sum(dout * xhat, axis=0)
    dbeta = np.sum(dout, axis=0)
    dxhat = dout * gamma
    dx = (inv / B) * (B * dxhat
                      - np.sum(dxhat, axis=0)
                      - xhat * np.sum(dxhat * xhat, axis=0))
    return dx, dgamma, dbeta


def forward(params, X, hidden_layers, running=None):
    """Run the network; batch statistics unless running stats are given.

    Returns (predictions, cache, batch_stats); batch_stats carries the
    batch-norm moments so the trainer can update the running averages.
    """
    cache = {"X": X}
    stats = {}
    if running is None:
        mu0 = X.mean(axis=0)
        var0 = X.var(axis=0)
    else:
        mu0, var0 = running["bn0_mean"], running["bn0_var"]
    stats["bn0_mean"], stats["bn0_var"] = mu0, var0
    z0, bn0_cache = _bn_forward(X, params["bn0_gamma"], params["bn0_beta"],
                                mu0, var0)
    cache["bn0"] = bn0_cache
    a = np.tanh(z0)
    cache["a_in"] = a
    for h in range(hidden_layers):
        s = a @ params["W%d" % h] + params["b%d" % h]
        a_next = np.tanh(s)
        cache["h%d_in" % h] = a
        cache["h%d_out" % h] = a_next
        a = a_next
    cache["pre_bn1"] = a
    if running is None:
        mu1 = a.mean(axis=0)
        var1 = a.var(axis=0)
    else:
        mu1, var1 = running["bn1_mean"], running["bn1_var"]
    stats["bn1_mean"], stats["bn1_var"] = mu1, var1
    z1, bn1_cache = _bn_forward(a, params["bn1_gamma"], params["bn1_beta"],
                                mu1, var1)
    cache["bn1"] = bn1_cache
    t = np.tanh(z1)
    cache["t"] = t
    yhat = (t @ params["W_out"] + params["b_out"]).ravel()
    return yhat, cache, stats


def loss_and_grads(params, X, y, hidden_layers, l2):
    """Training-mode loss, exact gradients, and batch-norm statistics.

    loss = mean squared error + (l2 / 2) * sum of squared dense weights.
    """
    B = X.shape[0]
    yhat, cache, stats = forward(params, X, hidden_layers)
    err = yhat - y
    loss = float(np.mean(err ** 2))
    grads = {}
    dyhat = (2.0 / B) * err[:, None]

    grads["W_out"] = cache["t"].T @ dyhat
    grads["b_out"] = dyhat.sum(axis=0)
    dt = dyhat @ params["W_out"].T
    dz1 = dt * (1.0 - cache["t"] ** 2)
    da, dg1, db1 = _bn_backward(dz1, cache["pre_bn1"], params["bn1_gamma"],
                                cache["bn1"])
    grads["bn1_gamma"], grads["bn1_beta"] = dg1, db1

    for h in range(hidden_layers - 1, -1, -1):
        ds = da * (1.0 - cache["h%d_out" % h] ** 2)
        grads["W%d" % h] = cache["h%d_in" % h].T @ ds
        grads["b%d" % h] = ds.sum(axis=0)
        da = ds @ params["W%d" % h].T

    dz0 = da * (1.0 - cache["a_in"] ** 2)
    dx, dg0, db0 = _bn_backward(dz0, cache["X"], params["bn0_gamma"],
                                cache["bn0"])
    grads["bn0_gamma"], grads["bn0_beta"] = dg0, db0

    weight_keys = ["W%d" % h for h in range(hidden_layers)] + ["W_out"]
    for key in weight_keys:
        loss += 0.5 * l2 * float(np.sum(params[key] ** 2))
        grads[key] = grads[key] + l2 * params[key]
    return loss, grads, stats


def _train_network(Z, t, hidden_layers, hidden_width, learning_rate, l2,
                   epochs, batch_size, rng):
    n, dim = Z.shape
    params = init_params(dim, hidden_layers, hidden_width, rng)
    running = init_running(dim, hidden_layers, hidden_width)
    m = {k: np.zeros_like(v) for k, v in params.items()}
    v = {k: np.zeros_like(v) for k, v in params.items()}
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    step = 0
    for epoch in range(epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            batch = order[start:start + batch_size]
            loss, grads, stats = loss_and_grads(params, Z[batch], t[batch],
                                                hidden_layers, l2)
            if not np.isfinite(loss):
                raise NumericalError(
                    "non-finite loss at epoch %d (H=%d, lr=%g, l2=%g)"
                    % (epoch, hidden_layers, learning_rate, l2))
            for key in running:
                running[key] = ((1 - _BN_MOMENTUM) * running[key]
                                + _BN_MOMENTUM * stats[key])
            step += 1
            for key in params:
                g = grads[key]
                m[key] = beta1 * m[key] + (1 - beta1) * g
                v[key] = beta2 * v[key] + (1 - beta2) * g ** 2
                m_hat = m[key] / (1 - beta1 ** step)
                v_hat = v[key] / (1 - beta2 ** step)
                params[key] -= learning_rate * m_hat / (np.sqrt(v_hat) + eps)
    return params, running


class MlpModel(TrainedModel):
    kind = "mlp"

    def __init__(self, scaler, dim, params, running, hidden_layers,
                 hidden_width, target_scaler, grid_results):
        super().__init__(scaler, dim)
        self.params = params
        self.running = running
        self.hiddenLayerCount = hidden_layers
        self.hiddenWidth = hidden_width
        self.targetScaler = target_scaler
        self.gridResults = grid_results  # (hidden layers, validation MSE)

    def predict(self, X):
        Z = self._check_inputs(X)
        yhat, _, _ = forward(self.params, Z, self.hiddenLayerCount,
                             running=self.running)
        return self.targetScaler.inverse(yhat)


def fit_mlp(train, val, learning_rate=0.0003, l2=0.03, epochs=15000,
            hidden_width=50, hidden_layer_grid=(1, 3, 5), batch_size=None,
            seed=0):
    """Grid search over hidden-layer counts, then keep the best network.

    Each candidate trains for the full epoch budget; the one with the
    lowest validation MSE (ties to the shallower net) is returned.
    """
    if train.dim != val.dim:
        raise DataError("train and validation dimensions differ")
    if epochs < 1:
        raise DataError("epochs must be >= 1")
    if learning_rate <= 0:
        raise DataError("learning_rate must be positive")
    if hidden_width < 1:
        raise DataError("hidden_width must be >= 1")
    if np.isscalar(hidden_layer_grid):
        hidden_layer_grid = (hidden_layer_grid,)
    if not hidden_layer_grid:
        raise DataError("hidden_layer_grid must not be empty")
    scaler, Z = fit_feature_scaler(train)
    target_scaler = TargetScaler.fit(train.y)
    t = target_scaler.transform(train.y)
    batch = batch_size if batch_size else min(64, train.n)
    grid_results = []
    best = None
    for idx, hidden_layers in enumerate(hidden_layer_grid):
        rng = np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, idx])
        params, running = _train_network(
            Z, t, int(hidden_layers), hidden_width, learning_rate, l2,
            epochs, batch, rng)
        model = MlpModel(scaler, train.dim, params, running,
                         int(hidden_layers), hidden_width, target_scaler,
                         None)
        val_mse = float(np.mean((model.predict(val.X) - val.y) ** 2))
        grid_results.append((int(hidden_layers), val_mse))
        if best is None or val_mse < best[0]:
            best = (val_mse, model)
    model = best[1]
    model.gridResults = tuple(grid_results)
    return model
