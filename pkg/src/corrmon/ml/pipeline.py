"""End-to-end training and evaluation over a feature file."""

from __future__ import annotations

import glob
import os
import time

import numpy as np
import pandas as pd

from ..physics import DEFAULT_ALARM_THRESHOLD
from ..schema import FEATURE_COLUMNS, TARGET_COLUMN
from .gridsearch import DEFAULT_GRIDS, grid_search
from .metrics import alarm_metrics, regression_metrics
from .models import FAMILIES, Standardizer, fit_forest, fit_gbm, fit_linear
from .persist import load, persist
from .split import time_series_split


def load_feature_frame(path: str) -> pd.DataFrame:
    df = pd.read_csv(path, parse_dates=["timestamp"])
    missing = [c for c in FEATURE_COLUMNS + [TARGET_COLUMN] if c not in df.columns]
    if missing:
        raise ValueError(f"feature file {path} lacks columns: {missing}")
    return df


def train_models(df: pd.DataFrame, families=FAMILIES, split_fraction: float = 0.75,
                 seed: int = 42, grids=None, out_dir: str | None = None,
                 n_folds: int = 3):
    """Grid-search, fit and optionally persist each requested family.

    Only the training partition is ever touched: the standardizer, the
    hyperparameter search, and the final fits all see train rows alone.
    """
    train_df, test_df = time_series_split(df, split_fraction)
    X_raw = train_df[FEATURE_COLUMNS].to_numpy(dtype=np.float64)
    y = train_df[TARGET_COLUMN].to_numpy(dtype=np.float64)
    standardizer = Standardizer.fit(X_raw)
    Xs = standardizer.transform(X_raw)

    models = {}
    for family in families:
        grid = (grids or DEFAULT_GRIDS)[family] if family != "linear" else {}
        hp = grid_search(Xs, y, family, grid=grid, seed=seed, n_folds=n_folds)
        start = time.perf_counter()
        if family == "linear":
            model = fit_linear(Xs, y, FEATURE_COLUMNS, standardizer, seed)
        elif family == "forest":
            model = fit_forest(Xs, y, hp, FEATURE_COLUMNS, standardizer, seed)
        elif family == "gbm":
            model = fit_gbm(Xs, y, hp, FEATURE_COLUMNS, standardizer, seed)
        elif family == "gbm2":
            model = fit_gbm(Xs, y, hp, FEATURE_COLUMNS, standardizer, seed,
                            second_order=True)
        else:
            raise ValueError(f"unknown family {family!r}")
        model.train_seconds = round(time.perf_counter() - start, 3)
        models[family] = model
        if out_dir is not None:
            os.makedirs(out_dir, exist_ok=True)
            persist(model, os.path.join(out_dir, f"{family}.json"))
    return models, train_df, test_df


def evaluate_models(models: dict, test_df: pd.DataFrame,
                    alarm_threshold: float = DEFAULT_ALARM_THRESHOLD) -> dict:
    X_raw = test_df[FEATURE_COLUMNS].to_numpy(dtype=np.float64)
    y = test_df[TARGET_COLUMN].to_numpy(dtype=np.float64)
    report = {"n_test_rows": len(test_df), "models": {}}
    for name, model in models.items():
        start = time.perf_counter()
        pred = model.predict(X_raw)
        infer_seconds = round(time.perf_counter() - start, 3)
        entry = regression_metrics(y, pred)
        entry["alarm"] = alarm_metrics(y, pred, alarm_threshold)
        entry["family"] = model.family
        entry["hyperparameters"] = model.hyperparameters
        entry["train_seconds"] = model.train_seconds
        entry["inference_seconds"] = infer_seconds
        report["models"][name] = entry
    return report


def load_models_dir(models_dir: str, expected_features=None) -> dict:
    models = {}
    for path in sorted(glob.glob(os.path.join(models_dir, "*.json"))):
        if os.path.basename(path) == "eval.json":
            continue
        model = load(path, expected_features=expected_features)
        models[os.path.splitext(os.path.basename(path))[0]] = model
    return models
