import json

import numpy as np
import pytest

from solematch import DegenerateLabelsError, HyperGrid, RandomForestMatcher, SchemaError, grid_search_cv
from solematch.errors import StateError


def separable_data(n=200, seed=0):
    """Two features carry the label with a guaranteed margin."""
    rng = np.random.default_rng(seed)
    y = rng.integers(0, 2, size=n)
    X = rng.uniform(-2, 2, size=(n, 2))
    X[:, 0] += y * 6.0
    X[:, 1] -= y * 6.0
    return X, y


def noise_data(n=200, p=5, seed=0):
    rng = np.random.default_rng(seed)
    return rng.normal(size=(n, p)), rng.integers(0, 2, size=n)


class TestTraining:
    def test_separable_oob_accuracy(self):
        X, y = separable_data(200, seed=1)
        model = RandomForestMatcher(n_trees=100, oob_score=True, seed=2).fit(X, y, columns=["a", "b"])
        assert model.oob_score_ >= 0.99

    def test_pure_noise_oob_near_chance(self):
        scores = []
        for seed in range(10):
            X, y = noise_data(150, seed=seed + 50)
            model = RandomForestMatcher(n_trees=60, oob_score=True, seed=seed).fit(
                X, y, columns=[f"f{i}" for i in range(5)]
            )
            scores.append(model.oob_score_)
        assert 0.4 <= float(np.mean(scores)) <= 0.6

    def test_single_class_rejected(self):
        X = np.random.default_rng(3).normal(size=(20, 3))
        with pytest.raises(DegenerateLabelsError):
            RandomForestMatcher(n_trees=5).fit(X, np.ones(20, dtype=int), columns=list("abc"))

    def test_max_features_is_ceil_sqrt(self):
        X, y = noise_data(60, p=35, seed=4)
        model = RandomForestMatcher(n_trees=3, seed=5).fit(X, y, columns=[f"f{i}" for i in range(35)])
        assert model.max_features_ == 6


class TestPredict:
    def test_unanimous_votes(self):
        X, y = separable_data(100, seed=6)
        model = RandomForestMatcher(n_trees=30, seed=7).fit(X, y, columns=["a", "b"])
        hot = model.predict_proba(np.array([12.0, -10.0]))
        cold = model.predict_proba(np.array([-6.0, 4.0]))
        assert hot == 1.0
        assert cold == 0.0

    def test_posterior_is_mean_of_tree_votes(self):
        X, y = separable_data(80, seed=8)
        model = RandomForestMatcher(n_trees=2, seed=9).fit(X, y, columns=["a", "b"])
        x = np.array([3.0, -2.0])
        votes = [tree.predict(x[None, :])[0] for tree in model.trees_]
        assert model.predict_proba(x) == pytest.approx(float(np.mean(votes)))

    def test_single_tree_memorizes_training_rows(self):
        rng = np.random.default_rng(10)
        X = rng.normal(size=(60, 4))  # continuous features, duplicate-free
        y = rng.integers(0, 2, size=60)
        if len(np.unique(y)) < 2:
            y[0] = 1 - y[0]
        model = RandomForestMatcher(n_trees=1, bootstrap=False, seed=11).fit(
            X, y, columns=list("abcd")
        )
        proba = model.predict_proba(X)
        np.testing.assert_array_equal(proba, y.astype(float))

    def test_posterior_in_unit_interval(self):
        X, y = noise_data(120, seed=12)
        model = RandomForestMatcher(n_trees=40, seed=13).fit(X, y, columns=[f"f{i}" for i in range(5)])
        proba = model.predict_proba(X)
        assert ((proba >= 0) & (proba <= 1)).all()

    def test_column_mismatch_rejected(self):
        X, y = separable_data(60, seed=14)
        model = RandomForestMatcher(n_trees=5, seed=15).fit(X, y, columns=["a", "b"])
        with pytest.raises(SchemaError):
            model.predict_proba(X, columns=["b", "a"])
        with pytest.raises(SchemaError):
            model.predict_proba(np.zeros((2, 3)))


class TestImportances:
    def test_sum_to_one(self):
        X, y = separable_data(100, seed=16)
        model = RandomForestMatcher(n_trees=25, seed=17).fit(X, y, columns=["a", "b"])
        assert model.feature_importances_.sum() == pytest.approx(1.0, abs=1e-9)

    def test_unused_feature_scores_zero(self):
        X, y = separable_data(150, seed=18)
        X = np.column_stack([X, np.zeros(len(X))])  # constant third column can never split
        model = RandomForestMatcher(n_trees=25, seed=19).fit(X, y, columns=["a", "b", "c"])
        assert model.feature_importances_[2] == 0.0

    def test_planted_signal_dominates(self):
        rng = np.random.default_rng(20)
        n = 300
        y = rng.integers(0, 2, size=n)
        X = rng.normal(size=(n, 4))
        X[:, 1] = y * 10.0 + rng.normal(0, 0.01, size=n)
        model = RandomForestMatcher(n_trees=50, seed=21).fit(X, y, columns=list("abcd"))
        assert model.feature_importances_[1] > 0.9

    def test_importance_table_matches_columns(self):
        X, y = separable_data(80, seed=22)
        model = RandomForestMatcher(n_trees=10, seed=23).fit(X, y, columns=["alpha", "beta"])
        table = model.importance_table()
        assert {name for name, _ in table} == {"alpha", "beta"}
        assert table[0][1] >= table[1][1]


class TestMissingValues:
    def test_no_missing_is_identity(self):
        X, y = separable_data(100, seed=24)
        model = RandomForestMatcher(n_trees=5, seed=25).fit(X, y, columns=["a", "b"])
        np.testing.assert_array_equal(model._impute(X), X)

    def test_imputation_uses_training_median(self):
        X, y = separable_data(101, seed=26)
        model = RandomForestMatcher(n_trees=5, seed=27).fit(X, y, columns=["a", "b"])
        x = np.array([np.nan, 0.0])
        imputed = model._impute(x[None, :])
        assert imputed[0, 0] == np.median(X[:, 0])

    def test_all_missing_column_warns_and_uses_zero(self):
        X, y = separable_data(80, seed=28)
        X = np.column_stack([X, np.full(len(X), np.nan)])
        with pytest.warns(UserWarning):
            model = RandomForestMatcher(n_trees=5, seed=29).fit(X, y, columns=["a", "b", "c"])
        assert model.medians_[2] == 0.0

    def test_untrained_imputer_raises(self):
        with pytest.raises(StateError):
            RandomForestMatcher()._impute(np.zeros((1, 2)))


class TestDeterminism:
    def test_identical_runs_produce_identical_json(self):
        X, y = separable_data(120, seed=30)
        a = RandomForestMatcher(n_trees=20, seed=31).fit(X, y, columns=["a", "b"]).to_json()
        b = RandomForestMatcher(n_trees=20, seed=31).fit(X, y, columns=["a", "b"]).to_json()
        assert a == b

    def test_parallel_training_matches_serial(self):
        X, y = separable_data(120, seed=32)
        serial = RandomForestMatcher(n_trees=16, seed=33, n_jobs=1).fit(X, y, columns=["a", "b"])
        parallel = RandomForestMatcher(n_trees=16, seed=33, n_jobs=2).fit(X, y, columns=["a", "b"])
        assert serial.to_json() == parallel.to_json()
        np.testing.assert_array_equal(serial.predict_proba(X), parallel.predict_proba(X))

    def test_round_trip_preserves_predictions(self):
        X, y = separable_data(90, seed=34)
        model = RandomForestMatcher(n_trees=12, seed=35).fit(X, y, columns=["a", "b"])
        clone = RandomForestMatcher.from_json(model.to_json())
        np.testing.assert_array_equal(model.predict_proba(X), clone.predict_proba(X))
        assert clone.to_json() == model.to_json()

    def test_shuffling_zero_importance_column_changes_nothing(self):
        X, y = separable_data(150, seed=36)
        X = np.column_stack([X, np.zeros(len(X))])
        model = RandomForestMatcher(n_trees=20, seed=37).fit(X, y, columns=["a", "b", "c"])
        assert model.feature_importances_[2] == 0.0
        shuffled = X.copy()
        shuffled[:, 2] = np.random.default_rng(38).permutation(len(X))
        acc0 = float(np.mean(model.predict(X) == y))
        acc1 = float(np.mean(model.predict(shuffled) == y))
        assert abs(acc0 - acc1) <= 0.005


class TestGridSearch:
    def test_full_grid_has_144_points(self):
        grid = HyperGrid()
        assert len(grid) == 144
        assert len(grid.points()) == 144
        assert grid.n_trees == (500, 1000, 2000, 5000)
        assert grid.max_depth == (10, 30, 50, None)
        assert grid.min_split == (2, 5, 10)
        assert grid.min_leaf == (1, 2, 4)

    def test_reduced_grid_on_separable_data(self):
        # desk-scale stand-in for the full sweep: unlimited depth should ace it
        X, y = separable_data(150, seed=39)
        grid = HyperGrid(n_trees=(10, 25), max_depth=(None,), min_split=(2,), min_leaf=(1, 2))
        best, table = grid_search_cv(X, y, grid, folds=5, seed=40)
        assert len(table) == len(grid)
        assert all(row["cv_accuracy"] >= 0.99 for row in table)
        assert best["n_trees"] == 10  # tie prefers fewer trees

    def test_group_constraint_respected(self):
        X, y = separable_data(100, seed=41)
        groups = np.repeat(np.arange(20), 5)
        from sklearn.model_selection import StratifiedGroupKFold

        splitter = StratifiedGroupKFold(n_splits=5, shuffle=True, random_state=42)
        for train_idx, val_idx in splitter.split(X, y, groups=groups):
            assert not set(groups[train_idx]) & set(groups[val_idx])

    def test_too_few_rows_per_class(self):
        X = np.random.default_rng(43).normal(size=(6, 2))
        y = np.array([1, 1, 1, 1, 1, 0])
        with pytest.raises(DegenerateLabelsError):
            grid_search_cv(X, y, HyperGrid(), folds=5, seed=44)


class TestModelFile:
    def test_schema_fields_present(self):
        X, y = separable_data(60, seed=45)
        model = RandomForestMatcher(n_trees=4, seed=46).fit(X, y, columns=["a", "b"])
        obj = json.loads(model.to_json())
        assert obj["schema_version"] == 1
        assert set(obj) == {"schema_version", "columns", "hyperparams", "seed", "medians", "importances", "trees"}
        assert len(obj["trees"]) == 4
        assert {"feature", "threshold", "left", "right", "value", "n_samples"} <= set(obj["trees"][0])

    def test_unsupported_schema_rejected(self):
        with pytest.raises(SchemaError):
            RandomForestMatcher.from_json(json.dumps({"schema_version": 99}))
