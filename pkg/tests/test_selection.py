import math

import numpy as np
import pytest

from edgemind.errors import ConfigError, InsufficientData, ShapeError
from edgemind.forecast import LeakageGuard, aggregate, cv_select, default_grid, expanding_splits, rmse
from edgemind.models.forecast import Method, ModelSpec


class TestRmse:
    def test_perfect_prediction(self):
        assert rmse([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 0.0

    def test_hand_value(self):
        assert rmse([0.0, 0.0], [3.0, 4.0]) == pytest.approx(math.sqrt(12.5))

    def test_matches_direct_sum(self):
        rng = np.random.default_rng(0)
        y, y_hat = rng.random(40), rng.random(40)
        assert rmse(y, y_hat) == pytest.approx(math.sqrt(sum((a - b) ** 2 for a, b in zip(y, y_hat)) / 40))

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            rmse([1.0, 2.0], [1.0])

    def test_aggregate_is_mean(self):
        assert aggregate([1.0, 2.0, 6.0]) == pytest.approx(3.0)


class TestSplits:
    def test_validation_follows_training(self):
        splits = expanding_splits(20, 3)
        assert len(splits) == 3
        for train, valid in splits:
            assert train.max() < valid.min()
            assert train.tolist() == list(range(len(train)))
        assert [len(train) for train, _ in splits] == sorted(len(train) for train, _ in splits)

    def test_needs_two_folds(self):
        with pytest.raises(ConfigError):
            expanding_splits(20, 1)

    def test_needs_more_rows_than_folds(self):
        with pytest.raises(InsufficientData):
            expanding_splits(3, 3)


class TestGrid:
    def test_sizes(self):
        assert len(default_grid(Method.BRR)) == 25
        assert len(default_grid(Method.GPR)) == 8
        assert default_grid(Method.RFR) == [ModelSpec(Method.RFR, {"n_trees": 200})]
        assert len(default_grid(Method.RFR, full_rf_grid=True)) == 3
        assert default_grid(Method.ARMA)[0].params == {"p": 4, "q": 2}

    def test_declared_order(self):
        first, second = default_grid(Method.BRR)[:2]
        assert first.params == {"alpha": 1e-6, "lambda": 1e-6}
        assert second.params == {"alpha": 1e-6, "lambda": 1e-3}


def linear_data(seed=0, n=60):
    rng = np.random.default_rng(seed)
    X = rng.random((n, 3)) * 10
    Y = (5.0 + X @ np.array([2.0, 1.0, 3.0]) + rng.normal(scale=0.5, size=n))[:, None]
    return X, Y


class TestCvSelect:
    def test_single_point_is_returned_without_fitting(self):
        spec = ModelSpec(Method.BRR, {"alpha": 1.0, "lambda": 1.0})
        selection = cv_select(Method.BRR, [spec], np.zeros((2, 1)), np.zeros((2, 1)))
        assert selection.spec is spec
        assert selection.score is None

    def test_good_point_beats_absurd_one(self):
        X, Y = linear_data()
        absurd = ModelSpec(Method.BRR, {"alpha": 1e-6, "lambda": 100.0})
        good = ModelSpec(Method.BRR, {"alpha": 100.0, "lambda": 1e-6})
        selection = cv_select(Method.BRR, [absurd, good], X, Y)
        assert selection.spec == good
        assert selection.scores[1] < selection.scores[0]

    def test_ties_go_to_the_first_point(self):
        X, Y = linear_data(seed=1)
        a = ModelSpec(Method.BRR, {"alpha": 1.0, "lambda": 1.0})
        b = ModelSpec(Method.BRR, {"alpha": 1.0, "lambda": 1.0})
        selection = cv_select(Method.BRR, [a, b], X, Y)
        assert selection.spec is a
        assert selection.scores[0] == selection.scores[1]

    def test_guard_sees_every_fold(self):
        X, Y = linear_data()
        guard = LeakageGuard(cutoff_bin=10**6)
        grid = default_grid(Method.BRR)[:2]
        cv_select(Method.BRR, grid, X, Y, folds=4, guard=guard)
        assert guard.checks == 4

    def test_empty_grid(self):
        with pytest.raises(ConfigError):
            cv_select(Method.GPR, [], np.zeros((5, 1)), np.zeros((5, 1)))
