"""Gaussian process: closed forms, dense-solve oracle, gradients."""

import numpy as np
import pytest

from abmemu.errors import DataError
from abmemu.surrogates import (
    Dataset, fit_gp, fit_linear, gp_log_marginal, gp_posterior,
)

from helpers import fd_gradient, gp_dense_posterior


def _smooth_dataset(n, dim, seed, noise=0.0):
    rng = np.random.default_rng(seed)
    X = rng.random((n, dim))
    y = np.sin(2.0 * np.pi * X[:, 0]) + X @ np.arange(1.0, dim + 1.0)
    if noise:
        y = y + noise * rng.standard_normal(n)
    return Dataset(X, y)


def test_two_point_closed_form():
    # fixed hyperparameters on two 1-D points admit a 2x2 hand solution
    X = np.array([[0.0], [1.0]])
    y = np.array([1.0, 3.0])
    nugget = 1e-4
    model = fit_gp(Dataset(X, y), nugget=nugget, optimize=False)

    # replicate the documented preprocessing, then solve by hand
    mu, sd = X.mean(), X.std(ddof=1)
    Z = ((X - mu) / sd).ravel()
    t_mu, t_sd = y.mean(), y.std(ddof=1)
    t = (y - t_mu) / t_sd
    r = t - t.mean()
    ell = model.lengthscales[0]
    sf2 = model._signal_var
    k01 = sf2 * np.exp(-0.5 * ((Z[0] - Z[1]) / ell) ** 2)
    K = np.array([[sf2 + nugget, k01], [k01, sf2 + nugget]])

    xq = np.array([0.25])
    zq = (xq - mu) / sd
    ks = sf2 * np.exp(-0.5 * ((zq - Z) / ell) ** 2)
    alpha = np.linalg.solve(K, r)
    mean = (ks @ alpha + t.mean()) * t_sd + t_mu
    var = (sf2 + nugget - ks @ np.linalg.solve(K, ks)) * t_sd ** 2

    got_mean, got_var = gp_posterior(model, xq)
    assert got_mean == pytest.approx(mean, abs=1e-10)
    assert got_var == pytest.approx(var, abs=1e-10)


def test_posterior_matches_dense_solve_oracle():
    data = _smooth_dataset(40, 3, seed=1, noise=0.3)
    model = fit_gp(data, n_restarts=2, max_iter=60)
    Xq = _smooth_dataset(15, 3, seed=2).X
    oracle_mean, oracle_var = gp_dense_posterior(model, data, Xq)
    means, variances = model.posterior(Xq)
    assert np.max(np.abs(means - oracle_mean)) < 1e-8
    assert np.max(np.abs(variances - oracle_var)) < 1e-8


def test_log_marginal_gradient_matches_finite_differences():
    rng = np.random.default_rng(3)
    Z = rng.normal(size=(20, 3))
    r = rng.normal(size=20)
    theta = rng.uniform(-1.0, 1.0, size=5)
    _, grad = gp_log_marginal(Z, r, theta)
    numeric = fd_gradient(lambda th: gp_log_marginal(Z, r, th)[0], theta)
    rel = np.abs(grad - numeric) / np.maximum(np.abs(numeric), 1.0)
    assert np.max(rel) < 1e-4


def test_interpolation_at_small_nugget():
    data = _smooth_dataset(25, 2, seed=4)
    model = fit_gp(data, nugget=1e-10, optimize=False)
    preds = model.predict(data.X)
    scale = np.std(data.y)
    assert np.max(np.abs(preds - data.y)) < 1e-6 * max(scale, 1.0)


def test_far_field_variance_reverts_to_prior():
    data = _smooth_dataset(30, 2, seed=5, noise=0.2)
    model = fit_gp(data, n_restarts=1, max_iter=40)
    far = np.full((1, 2), 1e6)
    _, var = gp_posterior(model, far.ravel())
    prior = model.signalVariance + model.nugget
    assert var == pytest.approx(prior, rel=1e-8)


def test_chol_factor_reproduces_kernel_matrix():
    data = _smooth_dataset(30, 3, seed=6, noise=0.2)
    model = fit_gp(data, n_restarts=1, max_iter=40)
    K = model.kernel_matrix()
    assert np.max(np.abs(model.cholFactor @ model.cholFactor.T - K)) < 1e-8


def test_variance_nonnegative_everywhere():
    data = _smooth_dataset(35, 2, seed=7, noise=0.1)
    model = fit_gp(data, n_restarts=1, max_iter=40)
    rng = np.random.default_rng(8)
    Xq = rng.uniform(-3, 4, size=(200, 2))
    _, variances = model.posterior(Xq)
    assert np.all(variances >= 0)


def test_fit_determinism():
    data = _smooth_dataset(30, 2, seed=9, noise=0.2)
    a = fit_gp(data, n_restarts=2, max_iter=30)
    b = fit_gp(data, n_restarts=2, max_iter=30)
    assert np.array_equal(a.lengthscales, b.lengthscales)
    assert a.logMarginal == b.logMarginal


def test_gp_validation():
    data = _smooth_dataset(12, 2, seed=10)
    with pytest.raises(DataError):
        fit_gp(data, nugget=0.0)
    with pytest.raises(DataError):
        fit_gp(data, n_restarts=0)
    with pytest.raises(DataError):
        fit_gp(data, max_n=10)
    model = fit_linear(data)
    with pytest.raises(DataError):
        gp_posterior(model, np.zeros(2))
