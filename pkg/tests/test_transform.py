import datetime as dt
import math

import numpy as np
import pytest

from conftest import make_series
from edgemind.errors import LeakageError, ShapeError
from edgemind.forecast import LeakageGuard, apply_transform, build_local, fit_transform
from edgemind.forecast.transform import fit_design
from edgemind.models.forecast import FeatureSpec
from edgemind.utils.calendar_utils import Calendar

CALENDAR = Calendar(dt.datetime(2017, 1, 31), 300)


def test_log_endpoints_map_to_unit_interval():
    X = np.array([[0.0], [math.e - 1]])
    transform = fit_transform(X, X, count_columns=np.array([True]))
    Xs, Ys = apply_transform(transform, X, X)
    assert Xs[:, 0].tolist() == pytest.approx([0.0, 1.0])
    assert Ys[:, 0].tolist() == pytest.approx([0.0, 1.0])


def test_calendar_columns_are_only_scaled():
    X = np.array([[0.0, 0.0], [3.0, 4.0], [1.0, 2.0]])
    transform = fit_transform(X, X[:, :1], count_columns=np.array([True, False]))
    Xs = transform.transform_x(X)
    assert Xs[:, 1].tolist() == pytest.approx([0.0, 1.0, 0.5])
    assert Xs[2, 0] == pytest.approx(math.log(2) / math.log(4))


def test_round_trip():
    rng = np.random.default_rng(5)
    X = rng.integers(0, 200, size=(50, 6)).astype(float)
    Y = rng.integers(0, 200, size=(50, 2)).astype(float)
    mask = np.array([True, True, False, True, True, False])
    transform = fit_transform(X, Y, mask)
    X_test = rng.integers(0, 400, size=(20, 6)).astype(float)
    assert np.abs(transform.inverse_x(transform.transform_x(X_test)) - X_test).max() < 1e-9
    assert np.abs(transform.inverse_y(transform.transform_y(Y)) - Y).max() < 1e-9


def test_test_rows_may_leave_unit_interval():
    transform = fit_transform(np.array([[0.0], [9.0]]), np.array([[0.0], [9.0]]), np.array([True]))
    assert transform.transform_x(np.array([[99.0]]))[0, 0] > 1.0


def test_constant_column_maps_to_zero():
    X = np.array([[5.0, 1.0], [5.0, 2.0], [5.0, 3.0]])
    transform = fit_transform(X, X[:, 1:], np.array([True, True]))
    assert transform.degenerate_x == (0,)
    assert np.all(transform.transform_x(X)[:, 0] == 0.0)
    assert transform.inverse_x(transform.transform_x(X))[:, 0] == pytest.approx([5.0, 5.0, 5.0])


def test_rejects_empty_training_set():
    with pytest.raises(ShapeError):
        fit_transform(np.zeros((0, 2)), np.zeros((0, 1)))
    with pytest.raises(ShapeError):
        fit_transform(np.zeros((3, 2)), np.zeros((3, 1)), np.array([True]))


class TestLeakageGuard:
    def test_counts_checks(self):
        guard = LeakageGuard(cutoff_bin=100)
        guard.check_rows(np.array([10, 99]), "fit")
        guard.check_folds(np.arange(5), np.arange(5, 8))
        assert guard.checks == 2

    def test_rejects_rows_past_cutoff(self):
        with pytest.raises(LeakageError):
            LeakageGuard(100).check_rows(np.array([50, 100]), "fit")

    def test_rejects_backward_fold(self):
        with pytest.raises(LeakageError):
            LeakageGuard(100).check_folds(np.arange(3, 8), np.arange(0, 3))

    def test_transform_fit_only_sees_training_rows(self):
        design = build_local(make_series(0, np.arange(3 * 288) % 50), CALENDAR, FeatureSpec(2, 1))
        train, test = design.split_at(2 * 288)
        guard = LeakageGuard(2 * 288)
        fit_design(train, guard)
        assert guard.checks == 1
        with pytest.raises(LeakageError):
            fit_design(design, guard)
        assert test.n_rows > 0
