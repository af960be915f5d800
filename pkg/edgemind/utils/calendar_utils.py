"""Map bin indices to calendar features."""
import datetime as dt
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

import numpy as np
import pandas as pd


@dataclass(frozen=True)
class Calendar:
    """Calendar of a binned trace: bin ``k`` starts ``k * bin_s`` seconds after ``epoch``."""

    epoch: dt.datetime
    bin_s: int

    def timestamps(self, bins: np.ndarray) -> pd.DatetimeIndex:
        seconds = np.asarray(bins, dtype=np.int64) * self.bin_s
        return pd.Timestamp(self.epoch) + pd.to_timedelta(seconds, unit="s")

    def hour(self, bins: np.ndarray) -> np.ndarray:
        return np.asarray(self.timestamps(bins).hour)

    def weekday(self, bins: np.ndarray) -> np.ndarray:
        """1 for Monday to Friday, 0 on weekends."""
        return (np.asarray(self.timestamps(bins).dayofweek) < 5).astype(int)

    def day(self, bins: np.ndarray) -> np.ndarray:
        """Calendar day index counted from the epoch's date."""
        stamps = self.timestamps(bins).normalize()
        return np.asarray((stamps - pd.Timestamp(self.epoch).normalize()).days)

    def bin_of(self, when: dt.datetime) -> int:
        """Index of the bin containing ``when``."""
        seconds = (pd.Timestamp(when) - pd.Timestamp(self.epoch)).total_seconds()
        return math.floor(seconds / self.bin_s)


def hour_index(hours: np.ndarray, kept: Tuple[int, ...]) -> np.ndarray:
    """Position of each hour in ``kept``; -1 for hours outside it."""
    lookup = np.full(24, -1, dtype=int)
    for position, hour in enumerate(kept):
        lookup[hour] = position
    return lookup[np.asarray(hours, dtype=int)]


def calculate_size_bounds(n_items: int, n_groups: int, low: Fraction = Fraction(4, 5), high: Fraction = Fraction(6, 5)) -> Tuple[int, int]:
    """
    Calculate per-group size bounds around the balanced size.

    Args:
        n_items: Number of items to split
        n_groups: Number of groups
        low: Lower factor applied to n_items / n_groups (rounded down)
        high: Upper factor applied to n_items / n_groups (rounded up)

    Returns:
        Tuple (min_size, max_size)
    """
    balanced = Fraction(n_items, n_groups)
    return math.floor(low * balanced), math.ceil(high * balanced)
