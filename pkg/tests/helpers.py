"""Shared oracles and builders for the test suite.

Everything here is an independent recomputation: brute-force loops,
dense linear algebra, or an external QP solver. Tests compare package
output against these, never against the package's own internals.
"""

import numpy as np

from abmemu import Dataset, PARAM_NAMES, SimParams
from abmemu.abm import CARE_LEVEL_HOURS, TOWNS
from abmemu.params import PARAM_BOUNDS


def friedman1(n, dim=10, seed=0, noise=0.0):
    """The classic five-term benchmark surface on [0,1]^dim."""
    rng = np.random.default_rng(seed)
    X = rng.random((n, dim))
    y = (10.0 * np.sin(np.pi * X[:, 0] * X[:, 1])
         + 20.0 * (X[:, 2] - 0.5) ** 2
         + 10.0 * X[:, 3] + 5.0 * X[:, 4])
    if noise:
        y = y + noise * rng.standard_normal(n)
    return X, y


def friedman_dataset(n, dim=10, seed=0, noise=0.0):
    X, y = friedman1(n, dim=dim, seed=seed, noise=noise)
    return Dataset(X, y)


def radical_inverse_2(k):
    """Base-2 radical inverse of a non-negative integer."""
    value = 0.0
    scale = 0.5
    while k:
        if k & 1:
            value += scale
        scale *= 0.5
        k >>= 1
    return value


def brute_force_standardize(data):
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    cols = []
    for j in range(arr.shape[1]):
        col = arr[:, j]
        mu = sum(col) / len(col)
        var = sum((v - mu) ** 2 for v in col) / (len(col) - 1)
        cols.append((col - mu) / np.sqrt(var))
    return np.column_stack(cols)


def brute_force_mse(actual, predicted):
    total = 0.0
    for a, p in zip(actual, predicted):
        total += (a - p) ** 2
    return total / len(actual)


def knn_bruteforce(train_X, train_y, Xq, k):
    """Exhaustive nearest-neighbour mean on z-scored features."""
    mu = train_X.mean(axis=0)
    sd = train_X.std(axis=0, ddof=1)
    Zt = (train_X - mu) / sd
    Zq = (np.asarray(Xq, dtype=float) - mu) / sd
    out = np.empty(Zq.shape[0])
    for i, z in enumerate(Zq):
        d = np.sum((Zt - z) ** 2, axis=1)
        nearest = np.argsort(d, kind="stable")[:k]
        out[i] = train_y[nearest].mean()
    return out


def _sse(y):
    return float(np.sum((y - y.mean()) ** 2)) if y.size else 0.0


def exhaustive_tree_sse(X, y, max_depth, min_leaf):
    """Best training SSE reachable by greedy exhaustive axis splits.

    At every node all midpoints between consecutive distinct feature
    values are tried; the split minimising child SSE wins. This is an
    independent CART recursion used as a loss oracle.
    """
    if max_depth == 0 or y.size < 2 * min_leaf:
        return _sse(y)
    best = None
    for j in range(X.shape[1]):
        values = np.unique(X[:, j])
        for a, b in zip(values[:-1], values[1:]):
            thr = 0.5 * (a + b)
            left = X[:, j] <= thr
            nl = int(left.sum())
            if nl < min_leaf or y.size - nl < min_leaf:
                continue
            loss = _sse(y[left]) + _sse(y[~left])
            if best is None or loss < best[0]:
                best = (loss, j, thr)
    if best is None:
        return _sse(y)
    _, j, thr = best
    left = X[:, j] <= thr
    return (exhaustive_tree_sse(X[left], y[left], max_depth - 1, min_leaf)
            + exhaustive_tree_sse(X[~left], y[~left], max_depth - 1, min_leaf))


def svr_qp_objective(K, y, C, epsilon):
    """Optimal dual objective of the epsilon-SVR QP via cvxopt.

    Stacked variables z = (alpha, alpha*) in [0, C]^{2n} with the
    balance constraint sum(alpha) = sum(alpha*); objective
    0.5 z'Qz + q'z with Q = [[K, -K], [-K, K]], q = (eps - y, eps + y).
    """
    import cvxopt

    n = K.shape[0]
    Q = np.block([[K, -K], [-K, K]]) + 1e-10 * np.eye(2 * n)
    q = np.concatenate([epsilon - y, epsilon + y])
    G = np.vstack([-np.eye(2 * n), np.eye(2 * n)])
    h = np.concatenate([np.zeros(2 * n), np.full(2 * n, C)])
    A = np.concatenate([np.ones(n), -np.ones(n)])[None, :]
    cvxopt.solvers.options["show_progress"] = False
    sol = cvxopt.solvers.qp(
        cvxopt.matrix(Q), cvxopt.matrix(q), cvxopt.matrix(G),
        cvxopt.matrix(h), cvxopt.matrix(A), cvxopt.matrix(np.zeros(1)))
    z = np.array(sol["x"]).ravel()
    return float(0.5 * z @ Q @ z + q @ z)


def gp_dense_posterior(model, train, Xq):
    """Dense-solve GP posterior given the model's fitted hyperparameters.

    Re-derives the preprocessing from the raw training data and solves
    the posterior with plain dense solves (no Cholesky reuse), in the
    model's internal scaled units, then maps back to natural units.
    """
    X = np.asarray(train.X, dtype=float)
    y = np.asarray(train.y, dtype=float)
    mu = X.mean(axis=0)
    sd = X.std(axis=0, ddof=1)
    Zt = (X - mu) / sd
    Zq = (np.asarray(Xq, dtype=float) - mu) / sd
    ty_mu = y.mean()
    ty_sd = y.std(ddof=1)
    if ty_sd == 0:
        ty_sd = 1.0
    t = (y - ty_mu) / ty_sd
    mean_const = t.mean()
    r = t - mean_const

    ell = model.lengthscales
    sf2 = model._signal_var
    sn2 = model._nugget_var

    def kern(A, B):
        sq = ((A[:, None, :] - B[None, :, :]) / ell) ** 2
        return sf2 * np.exp(-0.5 * sq.sum(axis=2))

    K = kern(Zt, Zt) + sn2 * np.eye(Zt.shape[0])
    Ks = kern(Zq, Zt)
    mean_s = Ks @ np.linalg.solve(K, r) + mean_const
    var_s = sf2 + sn2 - np.einsum(
        "ij,ji->i", Ks, np.linalg.solve(K, Ks.T))
    mean = mean_s * ty_sd + ty_mu
    var = np.maximum(var_s, 0.0) * ty_sd ** 2
    return mean, var


def fd_gradient(func, x, h=1e-5):
    """Central finite differences of a scalar function."""
    x = np.asarray(x, dtype=float)
    grad = np.empty_like(x)
    for i in range(x.size):
        up = x.copy()
        dn = x.copy()
        up[i] += h
        dn[i] -= h
        grad[i] = (func(up) - func(dn)) / (2.0 * h)
    return grad


def random_sim_params(rng):
    """Uniform draw of the ten policy parameters inside their ranges."""
    values = [rng.uniform(lo, hi) for lo, hi in
              (PARAM_BOUNDS[name] for name in PARAM_NAMES)]
    return SimParams.from_vector(values)


def check_year_invariants(state, params):
    """Assert conservation and closure properties for the current year."""
    alloc = state.last_allocation
    n = state.n_agents
    assert alloc is not None and alloc.year == state.year

    # care conservation
    assert np.all(alloc.hoursNeeded >= 0)
    assert np.all(alloc.hoursMet >= -1e-9)
    assert np.all(alloc.hoursMet <= alloc.hoursNeeded + 1e-9)
    assert np.all(alloc.hoursSupplied <= alloc.budgets + 1e-9)
    assert np.all(alloc.hoursSupplied >= -1e-9)
    assert abs(alloc.hoursSupplied.sum() - alloc.hoursMet.sum()) < 1e-6

    # only living carers without a care need supply anything
    suppliers = np.flatnonzero(alloc.hoursSupplied > 0)
    assert np.all(state.alive[suppliers])
    assert np.all(state.care_level[suppliers] == 0)

    # need follows the care level table
    needed = CARE_LEVEL_HOURS[state.care_level] * state.alive
    assert np.allclose(alloc.hoursNeeded, needed)

    # household closure: valid ids everywhere, towns exist
    assert np.all(state.household >= 0)
    assert np.all(state.household < state.household_town.size)
    assert np.all(state.household_town >= 0)
    assert np.all(state.household_town < len(TOWNS))

    # partner symmetry and parent ids within range
    partnered = np.flatnonzero(state.partner >= 0)
    assert np.all(state.partner[partnered] < n)
    assert np.all(state.partner[state.partner[partnered]] == partnered)
    assert np.all(state.alive[partnered])
    for ids in (state.mother, state.father):
        assert np.all(ids >= -1)
        assert np.all(ids < n)

    # status and cost sanity
    living = np.flatnonzero(state.alive)
    retired = living[state.status[living] == 3]
    assert np.all(state.age[retired] >= params.ageOfRetirement)
    assert np.all(state.age[living] >= 0)
    assert state.last_cost >= 0.0
