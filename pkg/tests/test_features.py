import datetime as dt

import numpy as np
import pytest

from conftest import make_series
from edgemind.errors import AlignmentError, ConfigError, InsufficientData
from edgemind.forecast import build_cluster, build_local
from edgemind.models.forecast import EVENING_HOURS, FeatureSpec
from edgemind.utils.calendar_utils import Calendar

# A Tuesday, so the weekday flag is 1.
EPOCH = dt.datetime(2017, 1, 31)
CALENDAR = Calendar(EPOCH, 300)


def test_constant_series_rows():
    design = build_local(make_series(0, [7] * 12), CALENDAR, FeatureSpec(1, 1))
    assert design.n_rows == 10
    assert np.all(design.X == [7.0, 0.0, 1.0])
    assert np.all(design.Y == 7.0)


def test_first_window_of_the_day_is_skipped():
    design = build_local(make_series(0, [1, 2, 3, 4]), CALENDAR, FeatureSpec(2, 1))
    assert design.target_bins.tolist() == [3]
    assert design.X.tolist() == [[2.0, 0.0, 1.0, 3.0, 0.0, 1.0]]
    assert design.Y.tolist() == [[4.0]]


@pytest.mark.parametrize("window", range(1, 11))
def test_local_row_width(window):
    design = build_local(make_series(0, np.arange(288)), CALENDAR, FeatureSpec(window, 2))
    assert design.X.shape[1] == 3 * window
    assert design.Y.shape[1] == 1


def test_row_width_without_weekday_flag():
    design = build_local(make_series(0, np.arange(50)), CALENDAR, FeatureSpec(4, 1, weekday_flag=False))
    assert design.X.shape[1] == 8


def test_three_station_cluster_width():
    members = [make_series(i, np.arange(40) + i) for i in range(3)]
    design = build_cluster(members, CALENDAR, FeatureSpec(2, 1))
    assert design.X.shape[1] == 10
    assert design.Y.shape[1] == 3
    assert design.stations == (0, 1, 2)
    assert design.count_columns.tolist() == [True, True, True, False, False] * 2


def test_cluster_column_order():
    a = make_series(0, [10, 11, 12, 13])
    b = make_series(1, [20, 21, 22, 23])
    design = build_cluster([a, b], CALENDAR, FeatureSpec(2, 1))
    assert design.X.tolist() == [[11.0, 21.0, 0.0, 1.0, 12.0, 22.0, 0.0, 1.0]]
    assert design.Y.tolist() == [[13.0, 23.0]]


def test_single_member_cluster_matches_local():
    series = make_series(4, np.random.default_rng(0).integers(0, 30, size=100))
    spec = FeatureSpec(3, 2)
    local = build_local(series, CALENDAR, spec)
    cluster = build_cluster([series], CALENDAR, spec)
    assert np.array_equal(local.X, cluster.X)
    assert np.array_equal(local.Y, cluster.Y)


def test_rows_stay_within_one_day():
    design = build_local(make_series(0, np.arange(2 * 288)), CALENDAR, FeatureSpec(3, 2))
    assert np.array_equal(CALENDAR.day(design.first_feature_bins), CALENDAR.day(design.target_bins))
    assert design.n_rows == 2 * (288 - 3 - 2)


def test_hour_subset():
    spec = FeatureSpec(2, 1, hours=EVENING_HOURS)
    design = build_local(make_series(0, np.arange(288)), CALENDAR, spec)
    hours = CALENDAR.hour(np.r_[design.first_feature_bins, design.target_bins])
    assert set(hours.tolist()) <= set(EVENING_HOURS)
    assert design.n_rows == 60 - 2 - 1
    # h counts positions within the kept hours
    assert design.X[:, 1].min() == 0 and design.X[:, 1].max() == 4


def test_weekend_flag():
    saturday = Calendar(dt.datetime(2017, 2, 4), 300)
    design = build_local(make_series(0, [1] * 10), saturday, FeatureSpec(1, 1))
    assert np.all(design.X[:, 2] == 0)


def test_too_short_series():
    with pytest.raises(InsufficientData):
        build_local(make_series(0, [1, 2, 3]), CALENDAR, FeatureSpec(2, 2))


def test_misaligned_members():
    with pytest.raises(AlignmentError):
        build_cluster([make_series(0, [1] * 10), make_series(1, [1] * 10, start_bin=1)], CALENDAR, FeatureSpec(1, 1))
    with pytest.raises(AlignmentError):
        build_cluster([make_series(0, [1] * 10, bin_s=600)], CALENDAR, FeatureSpec(1, 1))


def test_invalid_spec():
    with pytest.raises(ConfigError):
        FeatureSpec(0, 1)
    with pytest.raises(ConfigError):
        FeatureSpec(1, 1, hours=(24,))


def test_chronological_split():
    design = build_local(make_series(0, np.arange(3 * 288)), CALENDAR, FeatureSpec(2, 3))
    train, test = design.split_at(2 * 288)
    assert train.target_bins.max() < 2 * 288 <= test.first_feature_bins.min()
    assert train.split == "train" and test.split == "test"
