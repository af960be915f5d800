"""Fitted per-look-ahead forecasters answering point queries."""
import datetime as dt
import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from edgemind.errors import ConfigError, InsufficientData, MissingPrediction, NonStationary
from edgemind.forecast.arma import ArmaModel, fit_arma
from edgemind.forecast.features import build_cluster, calendar_columns
from edgemind.forecast.regressors import Regressor, make_regressor
from edgemind.forecast.selection import DEFAULT_RF_TREES, cv_select, default_grid
from edgemind.forecast.transform import FeatureTransform, LeakageGuard, fit_design
from edgemind.models.clustering import ClusterAssignment
from edgemind.models.forecast import FULL_DAY_HOURS, FeatureSpec, Method, Scope
from edgemind.models.telemetry import StationSeries
from edgemind.utils.calendar_utils import Calendar

logger = logging.getLogger(__name__)


@dataclass
class _Fitted:
    stations: Tuple[int, ...]
    transform: FeatureTransform
    model: Regressor


class DirectForecaster:
    """
    One model per look-ahead L for every station group, fitted on data
    before ``train_end`` (all data when it is None).

    Local scope groups each station alone; cluster scope groups the members
    of each cluster of ``assignment``.
    """

    def __init__(
        self,
        method: Method,
        scope: Scope = Scope.CLUSTER,
        window: int = 3,
        max_lookahead: int = 9,
        bin_s: int = 300,
        hours: Tuple[int, ...] = FULL_DAY_HOURS,
        weekday_flag: bool = True,
        folds: int = 3,
        seed: int = 0,
        rf_trees: int = DEFAULT_RF_TREES,
        n_jobs: int = 1,
    ):
        self.method = Method(method)
        self.scope = Scope(scope)
        if self.method is Method.ARMA and self.scope is Scope.CLUSTER:
            raise ConfigError("ARMA forecasts are local only")
        if window < 1 or max_lookahead < 1:
            raise ConfigError("window and max_lookahead must be >= 1")
        self.window = window
        self.max_lookahead = max_lookahead
        self.bin_s = bin_s
        self.hours = hours
        self.weekday_flag = weekday_flag
        self.folds = folds
        self.seed = seed
        self.rf_trees = rf_trees
        self.n_jobs = n_jobs
        self._series: Dict[int, StationSeries] = {}
        self._calendar: Optional[Calendar] = None
        self._models: Dict[Tuple[int, int], _Fitted] = {}
        self._arma: Dict[int, ArmaModel] = {}

    def _groups(self, n_stations: int, assignment: Optional[ClusterAssignment]) -> List[List[int]]:
        if self.scope is Scope.LOCAL:
            return [[i] for i in range(n_stations)]
        if assignment is None:
            return [list(range(n_stations))]
        return [assignment.members(c) for c in range(assignment.n_clusters) if assignment.members(c)]

    def fit(
        self,
        series: Mapping[int, StationSeries],
        epoch: dt.datetime,
        assignment: Optional[ClusterAssignment] = None,
        train_end: Optional[dt.datetime] = None,
    ) -> "DirectForecaster":
        self._series = dict(series)
        self._calendar = Calendar(epoch, self.bin_s)
        n_bins = max(len(s) for s in self._series.values())
        cutoff = self._calendar.bin_of(train_end) if train_end is not None else n_bins
        guard = LeakageGuard(cutoff)

        if self.method is Method.ARMA:
            for station, s in self._series.items():
                mask = s.bins < cutoff
                guard.check_rows(s.bins[mask], "ARMA fit")
                self._arma[station] = fit_arma(s.n_ue[mask])
            return self

        grid = default_grid(self.method, self.rf_trees)
        for group in self._groups(len(self._series), assignment):
            members = [self._series[i] for i in group]
            for lookahead in range(1, self.max_lookahead + 1):
                spec = FeatureSpec(self.window, lookahead, self.bin_s, self.hours, self.weekday_flag)
                design = build_cluster(members, self._calendar, spec)
                train, _ = design.split_at(cutoff)
                if train.n_rows <= self.folds:
                    raise InsufficientData(f"{train.n_rows} training rows for stations {group} at L={lookahead}")
                selection = cv_select(self.method, grid, train.X, train.Y, self.folds, train.count_columns, self.seed, self.n_jobs, guard)
                transform = fit_design(train, guard)
                model = make_regressor(selection.spec, self.seed, self.n_jobs)
                model.fit(transform.transform_x(train.X), transform.transform_y(train.Y))
                fitted = _Fitted(tuple(group), transform, model)
                for station in group:
                    self._models[(station, lookahead)] = fitted
        logger.info("Fitted %s/%s forecasters for L=1..%d", self.method.value, self.scope.value, self.max_lookahead)
        return self

    def _feature_row(self, stations: Sequence[int], origin: int) -> np.ndarray:
        assert self._calendar is not None
        steps = np.arange(origin - self.window + 1, origin + 1)
        counts = np.column_stack([np.asarray(self._series[i].n_ue, dtype=float)[steps] for i in stations])
        spec = FeatureSpec(self.window, 1, self.bin_s, self.hours, self.weekday_flag)
        per_step = np.column_stack([counts, calendar_columns(steps, self._calendar, spec)])
        return per_step.reshape(1, -1)

    def predict(self, station: int, origin_bin: int, lookahead: int) -> float:
        """Predicted users at ``station`` in bin ``origin_bin + lookahead`` using data up to ``origin_bin``."""
        if station not in self._series:
            raise MissingPrediction(f"no series for station {station}")
        n_bins = len(self._series[station])
        if not 1 <= lookahead <= self.max_lookahead:
            raise MissingPrediction(f"look-ahead {lookahead} outside 1..{self.max_lookahead}")
        if origin_bin < self.window - 1 or origin_bin >= n_bins:
            raise MissingPrediction(f"origin bin {origin_bin} outside the observed series of station {station}")

        if self.method is Method.ARMA:
            history = np.asarray(self._series[station].n_ue[: origin_bin + 1], dtype=float)
            try:
                return float(self._arma[station].forecast(history, lookahead)[-1])
            except NonStationary:
                return float(history[-1])

        fitted = self._models.get((station, lookahead))
        if fitted is None:
            raise MissingPrediction(f"no fitted model for station {station} at L={lookahead}")
        row = self._feature_row(fitted.stations, origin_bin)
        prediction = fitted.transform.inverse_y(fitted.model.predict(fitted.transform.transform_x(row)))
        return float(max(prediction[0, fitted.stations.index(station)], 0.0))
