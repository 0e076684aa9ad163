"""Hyperparameter grid search with walk-forward validation.

The tree-count axis (n_trees / n_rounds) is evaluated by growing one
maximal ensemble per remaining hyperparameter combination and scoring the
validation block at each checkpoint size.  Because per-tree seeds depend
only on (master seed, tree index), the checkpoint prefixes are exactly the
models a smaller grid cell would have produced.
"""

from __future__ import annotations

import math

import numpy as np

from .models import _forest_tree, _make_binner, derive_seed
from .split import walk_forward_folds
from .tree import fit_tree

DEFAULT_GRIDS = {
    "linear": {},
    "forest": {
        "n_trees": [50, 100, 200],
        "max_depth": [3, 5, 8],
        "feature_subsample": [0.5, 1.0],
    },
    "gbm": {
        "n_rounds": [50, 100, 200],
        "learning_rate": [0.01, 0.05, 0.1],
        "max_depth": [3, 5, 8],
    },
    "gbm2": {
        "n_rounds": [50, 100, 200],
        "learning_rate": [0.01, 0.05, 0.1],
        "max_depth": [3, 5, 8],
        "lam": [0.0, 1.0],
        "gamma": [0.0],
    },
}


class GridExhaustionError(RuntimeError):
    pass


def _rmse(y, pred):
    return math.sqrt(float(np.mean((np.asarray(y) - pred) ** 2)))


def _candidate_key(hp, score):
    # Tie order: fewer trees/rounds, then shallower, then lower learning rate.
    return (score,
            hp.get("n_trees", hp.get("n_rounds", 0)),
            hp.get("max_depth", 0),
            hp.get("learning_rate", 0.0),
            hp.get("lam", 0.0),
            hp.get("feature_subsample", 0.0))


def _search_forest(X, y, grid, seed, n_folds):
    sizes = sorted(grid["n_trees"])
    max_trees = sizes[-1]
    folds = walk_forward_folds(len(X), n_folds)
    candidates = {}
    for depth in grid["max_depth"]:
        for subsample in grid["feature_subsample"]:
            hp = {"max_depth": depth, "feature_subsample": subsample,
                  "min_samples_leaf": grid.get("min_samples_leaf", 1)}
            per_size = {c: [] for c in sizes}
            for tr, va in folds:
                Xtr, ytr = X[tr], y[tr]
                Xva = np.ascontiguousarray(X[va])
                binner, codes = _make_binner(Xtr)
                acc = np.zeros(len(va))
                for t in range(max_trees):
                    tree = _forest_tree(Xtr, ytr, codes, binner, hp,
                                        derive_seed(seed, t))
                    tree.add_to(Xva, 1.0, acc)
                    if (t + 1) in per_size:
                        per_size[t + 1].append(_rmse(y[va], acc / (t + 1)))
            for c in sizes:
                cand = dict(hp, n_trees=c)
                candidates[tuple(sorted(cand.items()))] = (
                    cand, float(np.mean(per_size[c])))
    return candidates


def _search_boosting(X, y, grid, seed, n_folds, second_order):
    sizes = sorted(grid["n_rounds"])
    max_rounds = sizes[-1]
    folds = walk_forward_folds(len(X), n_folds)
    lams = grid.get("lam", [0.0]) if second_order else [0.0]
    gammas = grid.get("gamma", [0.0]) if second_order else [0.0]
    candidates = {}
    for lr in grid["learning_rate"]:
        for depth in grid["max_depth"]:
            for lam in lams:
                for gamma in gammas:
                    hp = {"learning_rate": lr, "max_depth": depth,
                          "min_samples_leaf": grid.get("min_samples_leaf", 1)}
                    if second_order:
                        hp["lam"] = lam
                        hp["gamma"] = gamma
                    per_size = {c: [] for c in sizes}
                    for tr, va in folds:
                        Xtr = np.ascontiguousarray(X[tr])
                        ytr = y[tr]
                        Xva = np.ascontiguousarray(X[va])
                        binner, codes = _make_binner(Xtr)
                        base = float(ytr.mean())
                        pred_tr = np.full(len(tr), base)
                        pred_va = np.full(len(va), base)
                        for r in range(max_rounds):
                            residual = ytr - pred_tr
                            tree = fit_tree(Xtr if binner is None else None,
                                            residual, max_depth=depth,
                                            min_samples_leaf=hp["min_samples_leaf"],
                                            lam=lam if second_order else 0.0,
                                            gamma=gamma if second_order else 0.0,
                                            binner=binner, codes=codes)
                            tree.add_to(Xtr, lr, pred_tr)
                            tree.add_to(Xva, lr, pred_va)
                            if (r + 1) in per_size:
                                per_size[r + 1].append(_rmse(y[va], pred_va))
                    for c in sizes:
                        cand = dict(hp, n_rounds=c)
                        candidates[tuple(sorted(cand.items()))] = (
                            cand, float(np.mean(per_size[c])))
    return candidates


def grid_search(X, y, family, grid=None, seed=0, n_folds=3) -> dict:
    """Return the hyperparameters with the lowest mean validation RMSE."""
    if grid is None:
        grid = DEFAULT_GRIDS[family]
    if family == "linear" or not grid:
        return {}
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if family == "forest":
        candidates = _search_forest(X, y, grid, seed, n_folds)
    elif family in ("gbm", "gbm2"):
        candidates = _search_boosting(X, y, grid, seed, n_folds,
                                      second_order=(family == "gbm2"))
    else:
        raise ValueError(f"unknown family {family!r}")
    scored = [(hp, s) for hp, s in candidates.values() if math.isfinite(s)]
    if not scored:
        raise GridExhaustionError("no grid point produced a finite validation score")
    best_hp, _ = min(scored, key=lambda item: _candidate_key(item[0], item[1]))
    return best_hp
