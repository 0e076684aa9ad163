import numpy as np
import pytest

from corrmon.ml import (
    GridExhaustionError,
    ModelFileError,
    ModelSchemaError,
    Standardizer,
    fit_forest,
    fit_gbm,
    fit_linear,
    grid_search,
    load,
    persist,
)


def make_models(seed=0):
    rng = np.random.default_rng(seed)
    X_raw = rng.uniform(-3, 3, (300, 3))
    y = np.sin(X_raw[:, 0]) + 0.3 * X_raw[:, 1]
    std = Standardizer.fit(X_raw)
    Xs = std.transform(X_raw)
    feats = ["a", "b", "c"]
    return X_raw, {
        "linear": fit_linear(Xs, y, feats, std),
        "forest": fit_forest(Xs, y, {"n_trees": 10, "max_depth": 4}, feats, std, seed=1),
        "gbm": fit_gbm(Xs, y, {"n_rounds": 15, "learning_rate": 0.2,
                               "max_depth": 3}, feats, std, seed=1),
        "gbm2": fit_gbm(Xs, y, {"n_rounds": 15, "learning_rate": 0.2,
                                "max_depth": 3, "lam": 1.0, "gamma": 0.0},
                        feats, std, seed=1, second_order=True),
    }


class TestPersistence:
    def test_round_trip_bit_identical(self, tmp_path):
        X_raw, models = make_models()
        rng = np.random.default_rng(99)
        Xq = rng.uniform(-4, 4, (1000, 3))
        for name, model in models.items():
            path = tmp_path / f"{name}.json"
            persist(model, str(path))
            loaded = load(str(path))
            assert np.array_equal(model.predict(Xq), loaded.predict(Xq))
            assert loaded.family == model.family
            assert loaded.features == model.features

    def test_truncated_file_is_corrupt(self, tmp_path):
        _, models = make_models()
        path = tmp_path / "m.json"
        persist(models["gbm"], str(path))
        data = path.read_bytes()
        path.write_bytes(data[: len(data) // 2])
        with pytest.raises(ModelFileError):
            load(str(path))

    def test_feature_list_mismatch(self, tmp_path):
        _, models = make_models()
        path = tmp_path / "m.json"
        persist(models["linear"], str(path))
        with pytest.raises(ModelSchemaError):
            load(str(path), expected_features=["x", "y", "z"])

    def test_version_mismatch(self, tmp_path):
        _, models = make_models()
        path = tmp_path / "m.json"
        persist(models["linear"], str(path))
        doc = path.read_text().replace('"format_version": 1', '"format_version": 99')
        path.write_text(doc)
        with pytest.raises(ModelFileError):
            load(str(path))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ModelFileError):
            load(str(tmp_path / "nope.json"))


class TestGridSearch:
    def test_singleton_grid_returns_that_point(self):
        rng = np.random.default_rng(0)
        X = rng.standard_normal((120, 2))
        y = X[:, 0]
        hp = grid_search(X, y, "gbm",
                         grid={"n_rounds": [20], "learning_rate": [0.1],
                               "max_depth": [2]}, seed=0)
        assert hp["n_rounds"] == 20 and hp["learning_rate"] == 0.1 and hp["max_depth"] == 2

    def test_selected_point_beats_alternatives(self):
        # Step-function target: depth 1 suffices; absurd lr should lose.
        rng = np.random.default_rng(1)
        X = rng.uniform(0, 1, (400, 1))
        y = (X[:, 0] > 0.5) * 10.0
        grid = {"n_rounds": [5, 50], "learning_rate": [0.01, 1.0], "max_depth": [2]}
        hp = grid_search(X, y, "gbm", grid=grid, seed=0)
        assert hp["learning_rate"] == 1.0

    def test_tie_prefers_fewer_trees(self):
        # Constant target: every grid point scores identically.
        X = np.arange(100, dtype=float).reshape(-1, 1)
        y = np.full(100, 3.0)
        hp = grid_search(X, y, "forest",
                         grid={"n_trees": [50, 100], "max_depth": [3, 5],
                               "feature_subsample": [1.0]}, seed=0)
        assert hp["n_trees"] == 50
        assert hp["max_depth"] == 3

    def test_linear_has_empty_grid(self):
        assert grid_search(np.zeros((10, 1)), np.zeros(10), "linear") == {}

    def test_all_degenerate_scores_reported(self):
        rng = np.random.default_rng(2)
        X = rng.standard_normal((50, 1))
        y = np.full(50, np.nan)  # NaN target poisons every validation score
        with pytest.raises(GridExhaustionError):
            grid_search(X, y, "gbm",
                        grid={"n_rounds": [5], "learning_rate": [0.1],
                              "max_depth": [2]}, seed=0)
