"""Neural network: gradient exactness, grid search, training behaviour."""

import numpy as np
import pytest

from abmemu.errors import DataError
from abmemu.surrogates import Dataset, fit_mlp
from abmemu.surrogates.mlp import init_params, init_running, loss_and_grads

from helpers import fd_gradient


def _flatten(params, keys):
    return np.concatenate([params[k].ravel() for k in keys])


def _unflatten(vector, template, keys):
    out = {}
    offset = 0
    for k in keys:
        size = template[k].size
        out[k] = vector[offset:offset + size].reshape(template[k].shape)
        offset += size
    return out


def test_loss_gradient_matches_finite_differences():
    # two hidden layers, ten samples, every parameter tensor probed
    rng = np.random.default_rng(1)
    hidden_layers, width = 2, 6
    X = rng.normal(size=(10, 4))
    y = rng.normal(size=10)
    params = init_params(4, hidden_layers, width, rng)
    keys = sorted(params)
    _, grads, _ = loss_and_grads(params, X, y, hidden_layers, l2=0.02)
    analytic = _flatten(grads, keys)

    def loss_of(vector):
        p = _unflatten(vector, params, keys)
        return loss_and_grads(p, X, y, hidden_layers, 0.02)[0]

    numeric = fd_gradient(loss_of, _flatten(params, keys), h=1e-6)
    rel = np.abs(analytic - numeric) / np.maximum(np.abs(numeric), 1.0)
    assert np.max(rel) < 1e-4


def test_l2_term_only_touches_dense_weights():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(8, 3))
    y = rng.normal(size=8)
    params = init_params(3, 1, 5, rng)
    plain, grads0, _ = loss_and_grads(params, X, y, 1, l2=0.0)
    penalised, grads1, _ = loss_and_grads(params, X, y, 1, l2=0.5)
    weight_norm = sum(float(np.sum(params[k] ** 2)) for k in ("W0", "W_out"))
    assert penalised == pytest.approx(plain + 0.25 * weight_norm, rel=1e-12)
    for key in ("bn0_gamma", "bn1_beta", "b0", "b_out"):
        assert np.allclose(grads0[key], grads1[key], atol=1e-12)


def test_constant_target_is_learned():
    rng = np.random.default_rng(3)
    X = rng.random((30, 3))
    y = np.full(30, 3.7)
    train = Dataset(X[:20], y[:20])
    val = Dataset(X[20:], y[20:])
    model = fit_mlp(train, val, epochs=1500, hidden_layer_grid=(1,), seed=0)
    preds = model.predict(X)
    assert np.max(np.abs(preds - 3.7)) < 1e-2


def test_prediction_shape_and_purity():
    rng = np.random.default_rng(4)
    X = rng.random((40, 5))
    y = X @ np.arange(5.0) + rng.standard_normal(40)
    train = Dataset(X[:30], y[:30])
    val = Dataset(X[30:], y[30:])
    model = fit_mlp(train, val, epochs=200, hidden_layer_grid=(1, 2), seed=1)
    Xq = rng.random((7, 5))
    preds = model.predict(Xq)
    assert preds.shape == (7,)
    assert np.all(np.isfinite(preds))
    # inference uses frozen running statistics: batch size cannot matter
    assert np.array_equal(model.predict(Xq[:1])[0], preds[0])
    assert np.array_equal(model.predict(Xq), preds)


def test_grid_selection_records_all_candidates():
    rng = np.random.default_rng(5)
    X = rng.random((35, 2))
    y = np.sin(3.0 * X[:, 0]) + X[:, 1]
    train = Dataset(X[:25], y[:25])
    val = Dataset(X[25:], y[25:])
    model = fit_mlp(train, val, epochs=120, hidden_layer_grid=(1, 2), seed=2)
    assert len(model.gridResults) == 2
    depths = [h for h, _ in model.gridResults]
    assert depths == [1, 2]
    losses = [loss for _, loss in model.gridResults]
    assert all(np.isfinite(losses))
    best = min(range(2), key=lambda i: (losses[i], depths[i]))
    assert model.hiddenLayerCount == depths[best]


def test_scalar_grid_is_accepted():
    rng = np.random.default_rng(6)
    X = rng.random((25, 2))
    y = X.sum(axis=1)
    train = Dataset(X[:18], y[:18])
    val = Dataset(X[18:], y[18:])
    model = fit_mlp(train, val, epochs=50, hidden_layer_grid=2, seed=0)
    assert model.hiddenLayerCount == 2
    assert len(model.gridResults) == 1


def test_determinism_and_seed_sensitivity():
    rng = np.random.default_rng(7)
    X = rng.random((30, 3))
    y = X @ np.array([1.0, -1.0, 2.0])
    train = Dataset(X[:22], y[:22])
    val = Dataset(X[22:], y[22:])
    kwargs = dict(epochs=150, hidden_layer_grid=(1,))
    a = fit_mlp(train, val, seed=5, **kwargs)
    b = fit_mlp(train, val, seed=5, **kwargs)
    c = fit_mlp(train, val, seed=6, **kwargs)
    assert np.array_equal(a.predict(X), b.predict(X))
    assert not np.array_equal(a.predict(X), c.predict(X))


def test_running_stats_shapes():
    running = init_running(4, 0, 50)
    assert running["bn1_mean"].shape == (4,)
    running = init_running(4, 3, 50)
    assert running["bn1_mean"].shape == (50,)


def test_validation_errors():
    rng = np.random.default_rng(8)
    X = rng.random((20, 3))
    y = rng.random(20)
    train = Dataset(X[:15], y[:15])
    val = Dataset(X[15:], y[15:])
    with pytest.raises(DataError):
        fit_mlp(train, val, hidden_layer_grid=())
    bad_val = Dataset(rng.random((5, 2)), rng.random(5))
    with pytest.raises(DataError):
        fit_mlp(train, bad_val, epochs=10)
    with pytest.raises(DataError):
        fit_mlp(train, val, epochs=0)
