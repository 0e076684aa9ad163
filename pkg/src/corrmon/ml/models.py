"""Regressor families: linear baseline, bagged forest, two boosting variants."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .tree import (
    BinMapper,
    DecisionTree,
    DegenerateHyperparameters,
    EXACT_ROW_LIMIT,
    fit_tree,
)

FAMILIES = ("linear", "forest", "gbm", "gbm2")


def splitmix64(x: int) -> int:
    """One splitmix64 step; used to derive independent per-tree seeds."""
    x = (x + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return z ^ (z >> 31)


def derive_seed(master_seed: int, index: int) -> int:
    return splitmix64(splitmix64(master_seed) ^ (index + 1))


@dataclass
class Standardizer:
    mean: np.ndarray
    std: np.ndarray  # zero-variance features keep std=1 (divisor rule)

    @classmethod
    def fit(cls, X: np.ndarray) -> "Standardizer":
        mean = np.nanmean(X, axis=0)
        # Mean-impute before the moment estimate so std matches transform-time data.
        filled = np.where(np.isnan(X), mean, X)
        std = filled.std(axis=0)
        std = np.where(std == 0.0, 1.0, std)
        return cls(mean=mean, std=std)

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        filled = np.where(np.isnan(X), self.mean, X)
        return (filled - self.mean) / self.std


@dataclass
class TrainedModel:
    family: str
    features: list
    standardizer: Standardizer
    hyperparameters: dict
    seed: int
    train_seconds: float = 0.0

    def predict(self, X_raw: np.ndarray) -> np.ndarray:
        return self._predict_std(self.standardizer.transform(X_raw))

    def _predict_std(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError


@dataclass
class LinearModel(TrainedModel):
    intercept: float = 0.0
    coef: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def _predict_std(self, X: np.ndarray) -> np.ndarray:
        return X @ self.coef + self.intercept


@dataclass
class ForestModel(TrainedModel):
    trees: list = field(default_factory=list)

    def _predict_std(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        out = np.zeros(len(X), dtype=np.float64)
        for tree in self.trees:
            tree.add_to(X, 1.0, out)
        return out / len(self.trees)


@dataclass
class BoostedModel(TrainedModel):
    base_score: float = 0.0
    learning_rate: float = 0.1
    trees: list = field(default_factory=list)

    def _predict_std(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        out = np.full(len(X), self.base_score, dtype=np.float64)
        for tree in self.trees:
            tree.add_to(X, self.learning_rate, out)
        return out


class RankDeficiencyError(RuntimeError):
    pass


GRAM_JITTER = 1e-8


def fit_linear(X, y, features, standardizer, seed=0) -> LinearModel:
    """OLS via normal equations with a small ridge jitter on the Gram diagonal."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(X) <= X.shape[1]:
        raise RankDeficiencyError(
            f"need more rows ({len(X)}) than features ({X.shape[1]})")
    Xa = np.column_stack([np.ones(len(X)), X])
    gram = Xa.T @ Xa + GRAM_JITTER * np.eye(Xa.shape[1])
    try:
        beta = np.linalg.solve(gram, Xa.T @ y)
    except np.linalg.LinAlgError as exc:
        raise RankDeficiencyError("normal equations singular beyond jitter") from exc
    if not np.all(np.isfinite(beta)):
        raise RankDeficiencyError("non-finite solution to normal equations")
    return LinearModel(family="linear", features=list(features),
                       standardizer=standardizer, hyperparameters={},
                       seed=seed, intercept=float(beta[0]), coef=beta[1:])


def _check_tree_hp(n_trees, max_depth, min_samples_leaf, learning_rate=None,
                   feature_subsample=None, lam=None, gamma=None):
    if n_trees < 1 or (max_depth is not None and max_depth < 1) or min_samples_leaf < 1:
        raise DegenerateHyperparameters("n_trees, max_depth, min_samples_leaf must be >= 1")
    if learning_rate is not None and not (0 < learning_rate <= 1):
        raise DegenerateHyperparameters(f"learning_rate must be in (0,1], got {learning_rate}")
    if feature_subsample is not None and not (0 < feature_subsample <= 1):
        raise DegenerateHyperparameters(
            f"feature_subsample must be in (0,1], got {feature_subsample}")
    if (lam is not None and lam < 0) or (gamma is not None and gamma < 0):
        raise DegenerateHyperparameters("lambda and gamma must be >= 0")


def _make_binner(X):
    if len(X) > EXACT_ROW_LIMIT:
        binner = BinMapper().fit(X)
        return binner, binner.transform(X)
    return None, None


def _forest_tree(X, y, codes, binner, hp, tree_seed):
    """One bagged tree; factored out so grid search can grow forests incrementally."""
    n, n_feat = X.shape
    rng = np.random.Generator(np.random.PCG64(tree_seed))
    if hp.get("bootstrap", True):
        rows = rng.integers(0, n, n)
    else:
        rows = np.arange(n)
    subsample = hp.get("feature_subsample", 1.0)
    if subsample < 1.0:
        k = max(1, math.ceil(subsample * n_feat))
        feats = np.sort(rng.choice(n_feat, size=k, replace=False))
    else:
        feats = None

    if feats is None:
        if binner is not None:
            return fit_tree(None, y[rows], max_depth=hp["max_depth"],
                            min_samples_leaf=hp.get("min_samples_leaf", 1),
                            binner=binner, codes=codes[rows])
        return fit_tree(X[rows], y[rows], max_depth=hp["max_depth"],
                        min_samples_leaf=hp.get("min_samples_leaf", 1))
    if binner is not None:
        return fit_tree(None, y[rows], max_depth=hp["max_depth"],
                        min_samples_leaf=hp.get("min_samples_leaf", 1),
                        binner=binner.subset(feats), codes=codes[np.ix_(rows, feats)],
                        feature_map=feats)
    return fit_tree(X[np.ix_(rows, feats)], y[rows], max_depth=hp["max_depth"],
                    min_samples_leaf=hp.get("min_samples_leaf", 1),
                    feature_map=feats)


def fit_forest(X, y, hp, features, standardizer, seed) -> ForestModel:
    hp = dict(hp)
    _check_tree_hp(hp["n_trees"], hp.get("max_depth"), hp.get("min_samples_leaf", 1),
                   feature_subsample=hp.get("feature_subsample", 1.0))
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    binner, codes = _make_binner(X)
    trees = [_forest_tree(X, y, codes, binner, hp, derive_seed(seed, t))
             for t in range(hp["n_trees"])]
    return ForestModel(family="forest", features=list(features),
                       standardizer=standardizer, hyperparameters=hp,
                       seed=seed, trees=trees)


def fit_gbm(X, y, hp, features, standardizer, seed, second_order=False) -> BoostedModel:
    """Stagewise squared-loss boosting.

    Plain mode fits each round's tree to residuals with mean-valued leaves.
    Second-order mode uses L2-regularized leaf weights sum(g)/(sum(h)+lambda)
    and a gamma split-gain threshold; with squared loss the two coincide at
    lambda=0, gamma=0.
    """
    hp = dict(hp)
    lam = float(hp.get("lam", 0.0)) if second_order else 0.0
    gamma = float(hp.get("gamma", 0.0)) if second_order else 0.0
    _check_tree_hp(hp["n_rounds"], hp.get("max_depth"), hp.get("min_samples_leaf", 1),
                   learning_rate=hp["learning_rate"], lam=lam, gamma=gamma)
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    binner, codes = _make_binner(X)
    base = float(y.mean())
    pred = np.full(len(y), base)
    lr = float(hp["learning_rate"])
    trees = []
    for _ in range(hp["n_rounds"]):
        residual = y - pred
        tree = fit_tree(X if binner is None else None, residual,
                        max_depth=hp["max_depth"],
                        min_samples_leaf=hp.get("min_samples_leaf", 1),
                        lam=lam, gamma=gamma, binner=binner, codes=codes)
        tree.add_to(X, lr, pred)
        trees.append(tree)
    return BoostedModel(family="gbm2" if second_order else "gbm",
                        features=list(features), standardizer=standardizer,
                        hyperparameters=hp, seed=seed, base_score=base,
                        learning_rate=lr, trees=trees)
