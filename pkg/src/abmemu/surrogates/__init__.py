"""Nine regression surrogates behind one train/predict interface.

Each method key maps to a printable name and a fit function with the
uniform signature (train, val, seed, hyper). Only the neural network
consumes the validation set (for its hidden-layer grid search); only
the forest and the network consume the seed.
"""

from ..errors import DataError
from .base import Dataset, TargetScaler, TrainedModel, predict
from .forest import ForestModel, fit_random_forest
from .gbt import GbtModel, fit_gbt
from .gp import GpModel, fit_gp, gp_log_marginal, gp_posterior
from .io import load_model, save_model
from .knn import KnnModel, fit_knn
from .linear import LinearModel, fit_linear
from .mlp import MlpModel, fit_mlp
from .svr import SvrModel, fit_svr
from .tree import TreeModel, fit_decision_tree

METHOD_NAMES = {
    "linear": "Linear Regression",
    "tree": "Decision Trees",
    "forest": "Random Forest",
    "gbt": "Gradient Boosted Trees",
    "knn": "K-Nearest Neighbours",
    "gp": "Gaussian Process",
    "svr_linear": "Linear SVM",
    "svr_rbf": "Non-Linear SVM",
    "mlp": "Neural Network",
}

METHOD_ORDER = tuple(METHOD_NAMES)

_FITTERS = {
    "linear": lambda train, val, seed, hp: fit_linear(train, **hp),
    "tree": lambda train, val, seed, hp: fit_decision_tree(train, **hp),
    "forest": lambda train, val, seed, hp:
        fit_random_forest(train, seed=seed, **hp),
    "gbt": lambda train, val, seed, hp: fit_gbt(train, **hp),
    "knn": lambda train, val, seed, hp: fit_knn(train, **hp),
    "gp": lambda train, val, seed, hp: fit_gp(train, **hp),
    "svr_linear": lambda train, val, seed, hp:
        fit_svr(train, kernel="linear", **hp),
    "svr_rbf": lambda train, val, seed, hp:
        fit_svr(train, kernel="rbf", **hp),
    "mlp": lambda train, val, seed, hp: fit_mlp(train, val, seed=seed, **hp),
}


def fit_method(key, train, val=None, seed=0, hyper=None):
    """Fit one of the nine methods by key with optional overrides."""
    if key not in _FITTERS:
        raise DataError("unknown method %r; expected one of: %s"
                        % (key, ", ".join(METHOD_ORDER)))
    if key == "mlp" and val is None:
        raise DataError("method mlp requires a validation set")
    try:
        return _FITTERS[key](train, val, int(seed), dict(hyper or {}))
    except TypeError as exc:
        raise DataError("bad hyperparameters for %s: %s" % (key, exc)) from None


__all__ = [
    "Dataset", "TargetScaler", "TrainedModel", "predict",
    "METHOD_NAMES", "METHOD_ORDER", "fit_method",
    "LinearModel", "fit_linear",
    "TreeModel", "fit_decision_tree",
    "ForestModel", "fit_random_forest",
    "GbtModel", "fit_gbt",
    "KnnModel", "fit_knn",
    "GpModel", "fit_gp", "gp_posterior", "gp_log_marginal",
    "SvrModel", "fit_svr",
    "MlpModel", "fit_mlp",
    "save_model", "load_model",
]
