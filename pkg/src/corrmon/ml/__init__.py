"""Regression model training, tuning, evaluation, and persistence."""

from .gridsearch import DEFAULT_GRIDS, GridExhaustionError, grid_search
from .metrics import alarm_metrics, regression_metrics
from .models import (
    FAMILIES,
    BoostedModel,
    ForestModel,
    LinearModel,
    RankDeficiencyError,
    Standardizer,
    TrainedModel,
    derive_seed,
    fit_forest,
    fit_gbm,
    fit_linear,
)
from .persist import ModelFileError, ModelSchemaError, load, persist
from .pipeline import evaluate_models, load_feature_frame, load_models_dir, train_models
from .split import DegenerateSplitError, time_series_split, walk_forward_folds
from .tree import BinMapper, DecisionTree, DegenerateHyperparameters, fit_tree

__all__ = [
    "DEFAULT_GRIDS", "GridExhaustionError", "grid_search",
    "alarm_metrics", "regression_metrics",
    "FAMILIES", "BoostedModel", "ForestModel", "LinearModel",
    "RankDeficiencyError", "Standardizer", "TrainedModel", "derive_seed",
    "fit_forest", "fit_gbm", "fit_linear",
    "ModelFileError", "ModelSchemaError", "load", "persist",
    "evaluate_models", "load_feature_frame", "load_models_dir", "train_models",
    "DegenerateSplitError", "time_series_split", "walk_forward_folds",
    "BinMapper", "DecisionTree", "DegenerateHyperparameters", "fit_tree",
]
