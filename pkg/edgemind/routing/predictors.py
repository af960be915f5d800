"""Sources of predicted user counts for route ranking."""
import logging
from typing import Mapping, Optional, Protocol, Tuple

import numpy as np

from edgemind.errors import ConfigError, MissingPrediction
from edgemind.forecast.direct import DirectForecaster
from edgemind.models.telemetry import StationSeries

logger = logging.getLogger(__name__)

SECONDS_PER_DAY = 86400


class Predictor(Protocol):
    def predict(self, station: int, origin_bin: int, lookahead: int) -> float:
        """Predicted users at ``station`` in bin ``origin_bin + lookahead``."""
        ...


class TablePredictor:
    """Explicit predictions keyed by (station, target bin)."""

    def __init__(self, table: Mapping[Tuple[int, int], float]):
        self.table = dict(table)

    def predict(self, station: int, origin_bin: int, lookahead: int) -> float:
        key = (station, origin_bin + lookahead)
        if key not in self.table:
            raise MissingPrediction(f"no prediction for station {station} at bin {origin_bin + lookahead}")
        return float(self.table[key])


class HistoricalAveragePredictor:
    """Mean count in the same time-of-day bin over the previous days."""

    def __init__(self, series: Mapping[int, StationSeries], bin_s: int, days: Optional[int] = None):
        if SECONDS_PER_DAY % bin_s:
            raise ConfigError(f"bin_s={bin_s} does not divide a day")
        self.series = dict(series)
        self.bins_per_day = SECONDS_PER_DAY // bin_s
        self.days = days

    def predict(self, station: int, origin_bin: int, lookahead: int) -> float:
        if station not in self.series:
            raise MissingPrediction(f"no series for station {station}")
        counts = np.asarray(self.series[station].n_ue, dtype=float)
        target = origin_bin + lookahead
        past = np.arange(target - self.bins_per_day, -1, -self.bins_per_day)
        past = past[(past <= origin_bin) & (past < len(counts))]
        if self.days is not None:
            past = past[: self.days]
        if len(past) == 0:
            raise MissingPrediction(f"no earlier day covers bin {target} of station {station}")
        return float(counts[past].mean())


class ModelPredictor:
    """Predictions from fitted direct forecasters."""

    def __init__(self, forecaster: DirectForecaster):
        self.forecaster = forecaster

    def predict(self, station: int, origin_bin: int, lookahead: int) -> float:
        return self.forecaster.predict(station, origin_bin, lookahead)
