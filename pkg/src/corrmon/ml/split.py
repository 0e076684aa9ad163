"""Leakage-free time-ordered train/test splitting."""

from __future__ import annotations

import math

import numpy as np
import pandas as pd


class DegenerateSplitError(ValueError):
    pass


def time_series_split(df: pd.DataFrame, train_fraction: float = 0.75,
                      timestamp_col: str = "timestamp",
                      tiebreak_col: str = "station_code"):
    """Sort ascending by timestamp (ties: station code, then input order) and
    cut the first floor(f*N) rows into the training partition."""
    n = len(df)
    if n < 2:
        raise DegenerateSplitError(f"need at least 2 rows, got {n}")
    n_train = math.floor(train_fraction * n)
    if n_train == 0 or n_train == n:
        raise DegenerateSplitError(
            f"train_fraction={train_fraction} leaves an empty partition for N={n}")
    keys = [timestamp_col]
    if tiebreak_col in df.columns:
        keys.append(tiebreak_col)
    ordered = df.sort_values(keys, kind="stable")
    train = ordered.iloc[:n_train]
    test = ordered.iloc[n_train:]
    assert train[timestamp_col].max() <= test[timestamp_col].min()
    return train, test


def walk_forward_folds(n: int, n_folds: int = 3):
    """Ordered validation folds inside a training partition.

    The range [0, n) is cut into n_folds+1 equal blocks; fold k trains on the
    first k+1 blocks and validates on block k+2.
    """
    bounds = np.linspace(0, n, n_folds + 2).astype(int)
    folds = []
    for k in range(n_folds):
        train_end = bounds[k + 1]
        val_end = bounds[k + 2]
        if train_end == 0 or val_end == train_end:
            continue
        folds.append((np.arange(0, train_end), np.arange(train_end, val_end)))
    return folds
