"""Versioned npz serialisation for trained surrogates.

Every array a model needs to predict is stored exactly, so a
save/load round trip reproduces predictions bit for bit.
"""

import numpy as np

from ..analysis import Standardizer
from ..errors import DataError
from .base import TargetScaler
from .forest import ForestModel
from .gbt import GbtModel
from .gp import GpModel
from .knn import KnnModel
from .linear import LinearModel
from .mlp import MlpModel
from .svr import SvrModel
from .tree import TreeModel

FORMAT_VERSION = 1

_TREE_KEYS = ("feature", "threshold", "left", "right", "value")


def _pack_trees(prefix, trees, out):
    out[prefix + "_count"] = np.array(len(trees))
    for t, arrays in enumerate(trees):
        for key, arr in zip(_TREE_KEYS, arrays):
            out["%s%d_%s" % (prefix, t, key)] = arr


def _unpack_trees(prefix, data):
    count = int(data[prefix + "_count"])
    return [tuple(data["%s%d_%s" % (prefix, t, key)] for key in _TREE_KEYS)
            for t in range(count)]


def save_model(model, path):
    out = {
        "__version__": np.array(FORMAT_VERSION),
        "__kind__": np.array(model.kind),
        "dim": np.array(model.dim),
        "scaler_mean": model.scaler.mean,
        "scaler_std": model.scaler.std,
    }
    if isinstance(model, LinearModel):
        out.update(weights=model.weights,
                   intercept_std=np.array(model.interceptStd),
                   rank_deficient=np.array(model.rankDeficient))
    elif isinstance(model, GbtModel):
        out.update(base_value=np.array(model.baseValue),
                   shrinkage=np.array(model.shrinkage),
                   train_loss=model.trainLossCurve)
        _pack_trees("stage", model.stages, out)
    elif isinstance(model, ForestModel):
        out.update(feature_subset=np.array(model.featureSubsetSize),
                   seed=np.array(model.seed))
        _pack_trees("tree", model.trees, out)
    elif isinstance(model, TreeModel):
        out.update(min_leaf=np.array(model.minLeaf),
                   max_depth=np.array(-1 if model.maxDepth is None
                                      else model.maxDepth))
        for key, arr in zip(_TREE_KEYS, model.arrays):
            out["node_" + key] = arr
    elif isinstance(model, KnnModel):
        out.update(stored_x=model.storedX, stored_y=model.storedY,
                   k=np.array(model.k))
    elif isinstance(model, GpModel):
        out.update(training_x=model.trainingX,
                   lengthscales=model.lengthscales,
                   signal_var=np.array(model._signal_var),
                   nugget_var=np.array(model._nugget_var),
                   mean_const=np.array(model.meanConstant),
                   chol=model.cholFactor,
                   alpha=model.alphaWeights,
                   target_mean=np.array(model.targetScaler.mean),
                   target_std=np.array(model.targetScaler.std),
                   log_marginal=np.array(model.logMarginal))
    elif isinstance(model, SvrModel):
        out.update(kernel=np.array(model.kernel),
                   gamma=np.array(model.gamma),
                   support_vectors=model.supportVectors,
                   dual_coefficients=model.dualCoefficients,
                   bias=np.array(model.bias),
                   epsilon=np.array(model.epsilon),
                   C=np.array(model.C),
                   target_mean=np.array(model.targetScaler.mean),
                   target_std=np.array(model.targetScaler.std),
                   converged=np.array(model.converged),
                   kkt_violation=np.array(model.kktViolation))
    elif isinstance(model, MlpModel):
        out.update(hidden_layers=np.array(model.hiddenLayerCount),
                   hidden_width=np.array(model.hiddenWidth),
                   target_mean=np.array(model.targetScaler.mean),
                   target_std=np.array(model.targetScaler.std),
                   grid_results=np.array(model.gridResults or ()))
        for key, arr in model.params.items():
            out["p_" + key] = arr
        for key, arr in model.running.items():
            out["r_" + key] = arr
    else:
        raise DataError("cannot serialise model kind %r" % model.kind)
    with open(path, "wb") as fh:
        np.savez(fh, **out)


def load_model(path):
    with np.load(path, allow_pickle=False) as data:
        try:
            version = int(data["__version__"])
        except KeyError:
            raise DataError("%s is not a saved model file" % path) from None
        if version != FORMAT_VERSION:
            raise DataError("unsupported model file version %d" % version)
        kind = str(data["__kind__"])
        dim = int(data["dim"])
        scaler = Standardizer(mean=data["scaler_mean"], std=data["scaler_std"])
        if kind == "linear":
            return LinearModel(scaler, dim, data["weights"],
                               float(data["intercept_std"]),
                               bool(data["rank_deficient"]))
        if kind == "tree":
            arrays = tuple(data["node_" + key] for key in _TREE_KEYS)
            max_depth = int(data["max_depth"])
            return TreeModel(scaler, dim, arrays, int(data["min_leaf"]),
                             None if max_depth < 0 else max_depth)
        if kind == "forest":
            return ForestModel(scaler, dim, _unpack_trees("tree", data),
                               int(data["feature_subset"]), int(data["seed"]))
        if kind == "gbt":
            return GbtModel(scaler, dim, float(data["base_value"]),
                            _unpack_trees("stage", data),
                            float(data["shrinkage"]), data["train_loss"])
        if kind == "knn":
            return KnnModel(scaler, dim, data["stored_x"], data["stored_y"],
                            int(data["k"]))
        if kind == "gp":
            target = TargetScaler(mean=float(data["target_mean"]),
                                  std=float(data["target_std"]))
            return GpModel(scaler, dim, data["training_x"],
                           data["lengthscales"], float(data["signal_var"]),
                           float(data["nugget_var"]), float(data["mean_const"]),
                           data["chol"], data["alpha"], target,
                           float(data["log_marginal"]))
        if kind == "svr":
            target = TargetScaler(mean=float(data["target_mean"]),
                                  std=float(data["target_std"]))
            return SvrModel(scaler, dim, str(data["kernel"]),
                            float(data["gamma"]), data["support_vectors"],
                            data["dual_coefficients"], float(data["bias"]),
                            float(data["epsilon"]), float(data["C"]), target,
                            bool(data["converged"]),
                            float(data["kkt_violation"]), None)
        if kind == "mlp":
            target = TargetScaler(mean=float(data["target_mean"]),
                                  std=float(data["target_std"]))
            params = {key[2:]: data[key] for key in data.files
                      if key.startswith("p_")}
            running = {key[2:]: data[key] for key in data.files
                       if key.startswith("r_")}
            grid = tuple((int(h), float(m)) for h, m in data["grid_results"]) \
                if data["grid_results"].size else None
            return MlpModel(scaler, dim, params, running,
                            int(data["hidden_layers"]),
                            int(data["hidden_width"]), target, grid)
        raise DataError("unknown model kind %r in %s" % (kind, path))
