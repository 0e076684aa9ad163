import numpy as np
import pytest

from corrmon.ml import (
    BoostedModel,
    DegenerateHyperparameters,
    Standardizer,
    fit_forest,
    fit_gbm,
    fit_linear,
    RankDeficiencyError,
)


def identity_standardizer(n_features):
    return Standardizer(mean=np.zeros(n_features), std=np.ones(n_features))


FEATS3 = ["f0", "f1", "f2"]


class TestStandardizer:
    def test_train_stats_and_transform(self):
        X = np.array([[0.0], [10.0]])
        std = Standardizer.fit(X)
        assert std.mean[0] == 5.0
        assert std.std[0] == 5.0
        assert std.transform(np.array([[10.0]]))[0, 0] == 1.0

    def test_constant_feature_maps_to_zero(self):
        X = np.full((5, 1), 3.0)
        std = Standardizer.fit(X)
        assert np.all(std.transform(X) == 0.0)

    def test_mean_imputation_uses_train_means(self):
        X = np.array([[1.0], [3.0], [np.nan]])
        std = Standardizer.fit(X)
        assert std.mean[0] == 2.0
        assert std.transform(np.array([[np.nan]]))[0, 0] == 0.0

    def test_transformed_train_is_standard(self):
        rng = np.random.default_rng(0)
        X = rng.uniform(-5, 5, (500, 4))
        std = Standardizer.fit(X)
        Z = std.transform(X)
        assert np.allclose(Z.mean(axis=0), 0.0, atol=1e-9)
        assert np.allclose(Z.std(axis=0), 1.0, atol=1e-9)

    def test_affinity(self):
        rng = np.random.default_rng(1)
        X = rng.standard_normal((50, 2))
        std = Standardizer.fit(X)
        a, b = rng.standard_normal((2, 1, 2))
        lhs = std.transform(a) + std.transform(b) - 2 * std.transform((a + b) / 2)
        assert np.allclose(lhs, 0.0, atol=1e-12)


class TestLinear:
    def test_two_point_fit(self):
        X = np.array([[0.0], [1.0]])
        y = np.array([1.0, 3.0])
        model = fit_linear(X, y, ["x"], identity_standardizer(1))
        assert model.coef[0] == pytest.approx(2.0, abs=1e-6)
        assert model.intercept == pytest.approx(1.0, abs=1e-6)

    def test_exact_linear_target_r2_one(self):
        rng = np.random.default_rng(2)
        X = rng.standard_normal((100, 3))
        y = X @ np.array([1.0, -2.0, 0.5]) + 4.0
        model = fit_linear(X, y, FEATS3, identity_standardizer(3))
        assert np.allclose(model.predict(X), y, atol=1e-5)

    def test_constant_target_gives_intercept_only(self):
        rng = np.random.default_rng(3)
        X = rng.standard_normal((50, 2))
        y = np.full(50, 7.0)
        model = fit_linear(X, y, ["a", "b"], identity_standardizer(2))
        assert model.intercept == pytest.approx(7.0, abs=1e-5)
        assert np.allclose(model.coef, 0.0, atol=1e-5)

    def test_underdetermined_rejected(self):
        X = np.zeros((3, 5))
        with pytest.raises(RankDeficiencyError):
            fit_linear(X, np.zeros(3), list("abcde"), identity_standardizer(5))


class TestForest:
    def test_single_full_tree_memorizes(self):
        rng = np.random.default_rng(4)
        X = rng.standard_normal((40, 3))
        y = rng.standard_normal(40)
        model = fit_forest(X, y, {"n_trees": 1, "max_depth": 64,
                                  "min_samples_leaf": 1, "bootstrap": False},
                           FEATS3, identity_standardizer(3), seed=0)
        assert np.allclose(model.predict(X), y, atol=1e-12)

    def test_prediction_is_mean_of_trees(self):
        rng = np.random.default_rng(5)
        X = rng.standard_normal((200, 3))
        y = rng.standard_normal(200)
        model = fit_forest(X, y, {"n_trees": 7, "max_depth": 4}, FEATS3,
                           identity_standardizer(3), seed=1)
        Xq = rng.standard_normal((50, 3))
        acc = np.zeros(50)
        for tree in model.trees:
            acc += tree.predict(Xq)
        assert np.array_equal(model.predict(Xq), acc / 7)

    def test_deterministic_under_seed(self):
        rng = np.random.default_rng(6)
        X = rng.standard_normal((100, 3))
        y = rng.standard_normal(100)
        hp = {"n_trees": 5, "max_depth": 3, "feature_subsample": 0.5}
        m1 = fit_forest(X, y, hp, FEATS3, identity_standardizer(3), seed=9)
        m2 = fit_forest(X, y, hp, FEATS3, identity_standardizer(3), seed=9)
        Xq = rng.standard_normal((20, 3))
        assert np.array_equal(m1.predict(Xq), m2.predict(Xq))

    def test_degenerate_hp_rejected(self):
        with pytest.raises(DegenerateHyperparameters):
            fit_forest(np.zeros((4, 1)), np.zeros(4),
                       {"n_trees": 0, "max_depth": 3}, ["x"],
                       identity_standardizer(1), seed=0)
        with pytest.raises(DegenerateHyperparameters):
            fit_forest(np.zeros((4, 1)), np.zeros(4),
                       {"n_trees": 1, "max_depth": 3, "feature_subsample": 0.0},
                       ["x"], identity_standardizer(1), seed=0)


class TestBoosting:
    def test_single_round_equals_tree_plus_mean(self):
        rng = np.random.default_rng(7)
        X = rng.standard_normal((60, 3))
        y = rng.standard_normal(60)
        model = fit_gbm(X, y, {"n_rounds": 1, "learning_rate": 1.0,
                               "max_depth": 64}, FEATS3,
                        identity_standardizer(3), seed=0)
        assert np.allclose(model.predict(X), y, atol=1e-12)

    def test_training_mse_non_increasing(self):
        rng = np.random.default_rng(8)
        X = rng.standard_normal((300, 3))
        y = np.sin(X[:, 0]) + 0.1 * rng.standard_normal(300)
        for second_order in (False, True):
            hp = {"n_rounds": 30, "learning_rate": 0.3, "max_depth": 3}
            if second_order:
                hp.update(lam=1.0, gamma=0.0)
            model = fit_gbm(X, y, hp, FEATS3, identity_standardizer(3), seed=0,
                            second_order=second_order)
            pred = np.full(len(y), model.base_score)
            last = float(np.mean((y - pred) ** 2))
            for tree in model.trees:
                pred += model.learning_rate * tree.predict(X)
                mse = float(np.mean((y - pred) ** 2))
                assert mse <= last + 1e-12
                last = mse

    def test_gbm2_at_zero_regularization_matches_gbm(self):
        rng = np.random.default_rng(9)
        X = rng.standard_normal((100, 3))
        y = X[:, 0] ** 2 + rng.standard_normal(100) * 0.2
        hp = {"n_rounds": 10, "learning_rate": 0.5, "max_depth": 3}
        plain = fit_gbm(X, y, hp, FEATS3, identity_standardizer(3), seed=0)
        second = fit_gbm(X, y, dict(hp, lam=0.0, gamma=0.0), FEATS3,
                         identity_standardizer(3), seed=0, second_order=True)
        for t1, t2 in zip(plain.trees, second.trees):
            assert np.array_equal(t1.feature, t2.feature)
            assert np.array_equal(t1.threshold, t2.threshold)
            assert np.array_equal(t1.value, t2.value)
        Xq = rng.standard_normal((30, 3))
        assert np.array_equal(plain.predict(Xq), second.predict(Xq))

    def test_degenerate_hp_rejected(self):
        with pytest.raises(DegenerateHyperparameters):
            fit_gbm(np.zeros((4, 1)), np.zeros(4),
                    {"n_rounds": 5, "learning_rate": 1.5, "max_depth": 2},
                    ["x"], identity_standardizer(1), seed=0)

    def test_prediction_applies_standardizer(self):
        # Model trained on standardized features must accept raw rows.
        rng = np.random.default_rng(10)
        X_raw = rng.uniform(100, 200, (80, 2))
        y = X_raw[:, 0] * 0.01
        std = Standardizer.fit(X_raw)
        model = fit_gbm(std.transform(X_raw), y,
                        {"n_rounds": 20, "learning_rate": 0.5, "max_depth": 3},
                        ["a", "b"], std, seed=0)
        assert isinstance(model, BoostedModel)
        pred = model.predict(X_raw)
        assert float(np.mean((pred - y) ** 2)) < 0.01
