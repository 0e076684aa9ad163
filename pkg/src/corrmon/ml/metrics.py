"""Regression error metrics and threshold-alarm classification metrics."""

from __future__ import annotations

import math

import numpy as np


def regression_metrics(y_true, y_pred) -> dict:
    """MSE, RMSE, MAE and R^2 (SST about the evaluation-set mean).

    A constant target (SST = 0) makes R^2 undefined; it is reported as None
    with an explicit flag rather than a number.
    """
    y_true = np.asarray(y_true, dtype=np.float64)
    y_pred = np.asarray(y_pred, dtype=np.float64)
    if len(y_true) == 0:
        raise ValueError("empty evaluation set")
    err = y_true - y_pred
    mse = float(np.mean(err ** 2))
    mae = float(np.mean(np.abs(err)))
    sst = float(np.sum((y_true - y_true.mean()) ** 2))
    sse = float(np.sum(err ** 2))
    out = {
        "mse": mse,
        "rmse": math.sqrt(mse),
        "mae": mae,
    }
    if sst == 0.0:
        out["r2"] = None
        out["r2_undefined"] = True
    else:
        out["r2"] = 1.0 - sse / sst
        out["r2_undefined"] = False
    return out


def alarm_metrics(y_true, y_pred, threshold: float) -> dict:
    """Precision/recall/F1 of the binary alarm derived by thresholding rates."""
    actual = np.asarray(y_true) >= threshold
    flagged = np.asarray(y_pred) >= threshold
    tp = int(np.sum(actual & flagged))
    fp = int(np.sum(~actual & flagged))
    fn = int(np.sum(actual & ~flagged))
    precision = tp / (tp + fp) if (tp + fp) else None
    recall = tp / (tp + fn) if (tp + fn) else None
    if precision and recall:
        f1 = 2 * precision * recall / (precision + recall)
    elif precision is not None and recall is not None:
        f1 = 0.0
    else:
        f1 = None
    return {"threshold": threshold, "precision": precision, "recall": recall,
            "f1": f1, "true_positives": tp, "false_positives": fp,
            "false_negatives": fn}
