"""Model persistence: versioned JSON files with exact float round-trip."""

from __future__ import annotations

import json
import os

import numpy as np

from .models import BoostedModel, ForestModel, LinearModel, Standardizer, TrainedModel
from .tree import DecisionTree

FORMAT_VERSION = 1


class ModelFileError(RuntimeError):
    """Unreadable, corrupt, or wrong-version model file."""


class ModelSchemaError(ModelFileError):
    """Model feature list does not match the expected schema."""


def _tree_to_doc(tree: DecisionTree) -> dict:
    return {
        "feature": tree.feature.tolist(),
        "threshold": tree.threshold.tolist(),
        "left": tree.left.tolist(),
        "right": tree.right.tolist(),
        "value": tree.value.tolist(),
    }


def _tree_from_doc(doc: dict) -> DecisionTree:
    return DecisionTree(
        feature=np.asarray(doc["feature"], dtype=np.int64),
        threshold=np.asarray(doc["threshold"], dtype=np.float64),
        left=np.asarray(doc["left"], dtype=np.int64),
        right=np.asarray(doc["right"], dtype=np.int64),
        value=np.asarray(doc["value"], dtype=np.float64),
    )


def persist(model: TrainedModel, path: str) -> None:
    doc = {
        "format_version": FORMAT_VERSION,
        "family": model.family,
        "features": list(model.features),
        "standardizer": {
            "mean": model.standardizer.mean.tolist(),
            "std": model.standardizer.std.tolist(),
        },
        "hyperparameters": model.hyperparameters,
        "seed": model.seed,
        "train_seconds": model.train_seconds,
    }
    if isinstance(model, LinearModel):
        doc["structure"] = {"intercept": model.intercept, "coef": model.coef.tolist()}
    elif isinstance(model, ForestModel):
        doc["structure"] = {"trees": [_tree_to_doc(t) for t in model.trees]}
    elif isinstance(model, BoostedModel):
        doc["structure"] = {
            "base_score": model.base_score,
            "learning_rate": model.learning_rate,
            "trees": [_tree_to_doc(t) for t in model.trees],
        }
    else:
        raise ModelFileError(f"cannot persist family {model.family!r}")
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load(path: str, expected_features=None) -> TrainedModel:
    if not os.path.exists(path):
        raise ModelFileError(f"no such model file: {path}")
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError, OSError) as exc:
        raise ModelFileError(f"corrupt model file {path}: {exc}") from exc
    try:
        if doc["format_version"] != FORMAT_VERSION:
            raise ModelFileError(
                f"unsupported format version {doc['format_version']} in {path}")
        features = doc["features"]
        if expected_features is not None and list(expected_features) != features:
            raise ModelSchemaError(
                f"model {path} was trained on a different feature list")
        std = Standardizer(
            mean=np.asarray(doc["standardizer"]["mean"], dtype=np.float64),
            std=np.asarray(doc["standardizer"]["std"], dtype=np.float64))
        common = dict(family=doc["family"], features=features, standardizer=std,
                      hyperparameters=doc["hyperparameters"], seed=doc["seed"],
                      train_seconds=doc["train_seconds"])
        s = doc["structure"]
        if doc["family"] == "linear":
            return LinearModel(intercept=s["intercept"],
                               coef=np.asarray(s["coef"], dtype=np.float64), **common)
        if doc["family"] == "forest":
            return ForestModel(trees=[_tree_from_doc(t) for t in s["trees"]], **common)
        if doc["family"] in ("gbm", "gbm2"):
            return BoostedModel(base_score=s["base_score"],
                                learning_rate=s["learning_rate"],
                                trees=[_tree_from_doc(t) for t in s["trees"]], **common)
        raise ModelFileError(f"unknown family {doc['family']!r} in {path}")
    except (KeyError, TypeError) as exc:
        raise ModelFileError(f"malformed model file {path}: {exc}") from exc
