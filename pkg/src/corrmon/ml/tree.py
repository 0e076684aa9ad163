"""CART regression trees with exact or histogram split search."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _treekernels as tk

# Fits at or below this row count always use the exact midpoint-threshold
# search; larger fits switch to 256-bin quantile histograms.
EXACT_ROW_LIMIT = 2048
MAX_BINS = 256
UNBOUNDED_DEPTH = 64


class DegenerateHyperparameters(ValueError):
    pass


@dataclass
class DecisionTree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    feature_map: np.ndarray | None = None  # local -> global feature indices

    def __post_init__(self):
        if self.feature_map is not None and len(self.feature):
            # Remap to global feature space once so prediction is uniform.
            remapped = self.feature.copy()
            mask = remapped != tk.LEAF
            remapped[mask] = self.feature_map[remapped[mask]]
            self.feature = remapped
            self.feature_map = None

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        out = np.empty(len(X), dtype=np.float64)
        tk.predict_tree(X, self.feature, self.threshold, self.left,
                        self.right, self.value, out)
        return out

    def add_to(self, X: np.ndarray, scale: float, out: np.ndarray) -> None:
        tk.add_tree_prediction(X, self.feature, self.threshold, self.left,
                               self.right, self.value, scale, out)


@dataclass
class BinMapper:
    """Quantile binning shared by all trees of one ensemble fit."""

    edges: list = field(default_factory=list)  # per feature: ascending bin upper edges

    def fit(self, X: np.ndarray) -> "BinMapper":
        self.edges = []
        for j in range(X.shape[1]):
            uniq = np.unique(X[:, j])
            if len(uniq) <= MAX_BINS:
                self.edges.append(uniq)
            else:
                qs = np.quantile(X[:, j], np.linspace(0, 1, MAX_BINS + 1)[1:-1])
                self.edges.append(np.unique(np.append(qs, uniq[-1])))
        return self

    def subset(self, feats) -> "BinMapper":
        return BinMapper(edges=[self.edges[j] for j in feats])

    def transform(self, X: np.ndarray) -> np.ndarray:
        codes = np.empty(X.shape, dtype=np.uint8)
        for j, e in enumerate(self.edges):
            # code c: x <= e[c] (last bin catches everything above)
            codes[:, j] = np.searchsorted(e, X[:, j], side="left").clip(max=len(e) - 1)
        return codes

    def n_bins(self) -> np.ndarray:
        return np.array([max(len(e), 1) for e in self.edges], dtype=np.int64)

    def edge_matrix(self) -> np.ndarray:
        mat = np.zeros((len(self.edges), MAX_BINS), dtype=np.float64)
        for j, e in enumerate(self.edges):
            mat[j, :len(e)] = e
        return mat


def fit_tree(X, y, max_depth=None, min_samples_leaf=1, lam=0.0, gamma=0.0,
             binner: BinMapper | None = None, codes: np.ndarray | None = None,
             feature_map: np.ndarray | None = None) -> DecisionTree:
    """Grow one regression tree.

    When `binner`/`codes` are given the histogram search runs on the
    pre-binned matrix; otherwise the exact search runs on raw values.
    `feature_map` translates column indices of X back to the full feature
    space (used by per-tree feature subsampling).
    """
    if max_depth is None:
        max_depth = UNBOUNDED_DEPTH
    if max_depth < 1 or min_samples_leaf < 1:
        raise DegenerateHyperparameters(
            f"max_depth={max_depth}, min_samples_leaf={min_samples_leaf}")
    y = np.ascontiguousarray(y, dtype=np.float64)
    if binner is not None:
        if codes is None:
            codes = binner.transform(X)
        arrays = tk.build_hist(np.ascontiguousarray(codes), binner.n_bins(),
                               binner.edge_matrix(), y, max_depth,
                               min_samples_leaf, float(lam), float(gamma))
    else:
        X = np.ascontiguousarray(X, dtype=np.float64)
        arrays = tk.build_exact(X, y, max_depth, min_samples_leaf,
                                float(lam), float(gamma))
    return DecisionTree(*arrays, feature_map=feature_map)
