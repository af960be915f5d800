"""Feature rows and targets for the local and cluster regressors.

Each past step contributes the user counts of the modeled stations followed
by the hour index h and, when enabled, the weekday flag. Within every day
only the kept hours are used and the first W samples are skipped, so no row
straddles a day boundary or an excluded hour.
"""
import logging
from typing import List, Sequence

import numpy as np

from edgemind.errors import AlignmentError, InsufficientData
from edgemind.models.forecast import DesignMatrix, FeatureSpec
from edgemind.models.telemetry import StationSeries
from edgemind.utils.calendar_utils import Calendar, hour_index

logger = logging.getLogger(__name__)


def _check_aligned(members: Sequence[StationSeries], spec: FeatureSpec) -> np.ndarray:
    if not members:
        raise AlignmentError("a cluster needs at least one member series")
    bins = members[0].bins
    for series in members:
        if series.bin_s != spec.bin_s:
            raise AlignmentError(f"station {series.station} is binned at {series.bin_s} s, expected {spec.bin_s} s")
        if len(series.bins) != len(bins) or not np.array_equal(series.bins, bins):
            raise AlignmentError(f"station {series.station} bins differ from station {members[0].station}")
    return np.asarray(bins, dtype=np.int64)


def usable_segments(bins: np.ndarray, calendar: Calendar, hours: Sequence[int]) -> List[np.ndarray]:
    """Runs of consecutive bins inside the kept hours of one calendar day."""
    h = hour_index(calendar.hour(bins), tuple(hours))
    positions = np.flatnonzero(h >= 0)
    if len(positions) == 0:
        return []
    day = calendar.day(bins[positions])
    breaks = (np.diff(bins[positions]) != 1) | (np.diff(day) != 0)
    return np.split(positions, np.flatnonzero(breaks) + 1)


def calendar_columns(bins: np.ndarray, calendar: Calendar, spec: FeatureSpec) -> np.ndarray:
    """Per-bin calendar features: h and, when enabled, the weekday flag."""
    columns = [hour_index(calendar.hour(bins), spec.hours)]
    if spec.weekday_flag:
        columns.append(calendar.weekday(bins))
    return np.column_stack(columns).astype(float)


def row_origins(bins: np.ndarray, calendar: Calendar, spec: FeatureSpec) -> np.ndarray:
    """Positions t with a full window before them and a target L steps ahead in the same segment."""
    origins = [
        segment[spec.window : len(segment) - spec.lookahead]
        for segment in usable_segments(bins, calendar, spec.hours)
    ]
    origins = [o for o in origins if len(o)]
    return np.concatenate(origins) if origins else np.zeros(0, dtype=np.int64)


def stack_window(per_bin: np.ndarray, origins: np.ndarray, window: int) -> np.ndarray:
    """Concatenate the per-bin feature blocks of steps t-W+1 .. t for each origin t."""
    return np.concatenate([per_bin[origins - window + 1 + k] for k in range(window)], axis=1)


def build_cluster(members: Sequence[StationSeries], calendar: Calendar, spec: FeatureSpec) -> DesignMatrix:
    """
    Design matrix for a cluster-based regressor.

    Args:
        members: Aligned series of the cluster's stations, in station order
        calendar: Calendar of the binned trace
        spec: Window, look-ahead and calendar settings

    Returns:
        DesignMatrix with (N + c) * W feature columns and N target columns,
        where N is the number of members and c the calendar width
    """
    bins = _check_aligned(members, spec)
    counts = np.column_stack([np.asarray(s.n_ue, dtype=float) for s in members])
    per_bin = np.column_stack([counts, calendar_columns(bins, calendar, spec)])
    origins = row_origins(bins, calendar, spec)
    if len(origins) == 0:
        raise InsufficientData(
            f"no rows for W={spec.window}, L={spec.lookahead} over {len(bins)} bins of stations "
            f"{[s.station for s in members]}"
        )

    block = np.r_[np.ones(len(members), dtype=bool), np.zeros(spec.calendar_width, dtype=bool)]
    return DesignMatrix(
        X=stack_window(per_bin, origins, spec.window),
        Y=counts[origins + spec.lookahead],
        feature_bins=bins[origins],
        target_bins=bins[origins + spec.lookahead],
        stations=tuple(s.station for s in members),
        count_columns=np.tile(block, spec.window),
        spec=spec,
    )


def build_local(series: StationSeries, calendar: Calendar, spec: FeatureSpec) -> DesignMatrix:
    """Design matrix for a single station: rows [N(t-W+1), h, w, ..., N(t), h, w]."""
    return build_cluster([series], calendar, spec)
