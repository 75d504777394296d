"""Surrogate-modelling toolkit for a social-care agent-based model.

The pieces, bottom to top: a demographic ABM whose output is the
per-capita annual cost of unmet care (``abm``), quasi-random
experimental designs (``design``), nine regression surrogates behind
one interface (``surrogates``), splits/PCA/sensitivity analysis
(``analysis``), and batch orchestration with CSV/JSON reports
(``pipeline``, ``cli``).
"""

from .abm import (Agent, CareAllocation, RunResult, SimState, Town,
                  annual_cost, develop_care_need, init_population,
                  run_simulation, step_year)
from .analysis import (MainEffectCurve, PcaResult, SplitIndices,
                       Standardizer, main_effects, mse, pca_decompose,
                       relative_scores, retained_components,
                       significant_loadings, split_dataset, standardize)
from .design import (ParamRanges, UnitDesign, centered_l2_discrepancy,
                     generate_design, maximin_lhs, scale_design,
                     sobol_point, sobol_sequence, unscale_design)
from .errors import (AbmEmuError, DataError, DegenerateFeatureError,
                     NumericalError, SequencingError,
                     UnsupportedDimensionError)
from .params import PARAM_NAMES, PARAM_TABLE, Demographics, SimParams
from .pipeline import (AnalysisReport, RunRecord, ScenarioConfig,
                       compare_methods, emit_report, read_runs_csv,
                       records_to_dataset, run_batch, run_study,
                       write_runs_csv)
from .surrogates import (Dataset, METHOD_NAMES, METHOD_ORDER, TrainedModel,
                         fit_method, load_model, predict, save_model)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "AbmEmuError", "DataError", "NumericalError", "SequencingError",
    "DegenerateFeatureError", "UnsupportedDimensionError",
    # parameters
    "SimParams", "Demographics", "PARAM_NAMES", "PARAM_TABLE",
    # simulation
    "Agent", "Town", "SimState", "CareAllocation", "RunResult",
    "init_population", "step_year", "run_simulation", "annual_cost",
    "develop_care_need",
    # designs
    "ParamRanges", "UnitDesign", "sobol_point", "sobol_sequence",
    "maximin_lhs", "generate_design", "scale_design", "unscale_design",
    "centered_l2_discrepancy",
    # analysis
    "SplitIndices", "Standardizer", "PcaResult", "MainEffectCurve",
    "split_dataset", "standardize", "mse", "pca_decompose",
    "retained_components", "significant_loadings", "main_effects",
    "relative_scores",
    # surrogates
    "Dataset", "TrainedModel", "METHOD_NAMES", "METHOD_ORDER",
    "fit_method", "predict", "save_model", "load_model",
    # pipeline
    "RunRecord", "ScenarioConfig", "AnalysisReport", "run_batch",
    "compare_methods", "run_study", "emit_report", "write_runs_csv",
    "read_runs_csv", "records_to_dataset",
]
