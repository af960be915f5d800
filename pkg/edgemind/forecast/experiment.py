"""Local- versus cluster-based forecasting experiments."""
import datetime as dt
import logging
from dataclasses import dataclass, replace
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from edgemind.errors import ConfigError, InsufficientData
from edgemind.forecast.arma import fit_arma, forecast_at
from edgemind.forecast.features import build_cluster
from edgemind.forecast.selection import (
    DEFAULT_RF_TREES,
    Selection,
    cv_select,
    default_grid,
    fit_predict,
    rmse_per_column,
)
from edgemind.forecast.transform import LeakageGuard
from edgemind.models.clustering import ClusterAssignment, Strategy
from edgemind.models.forecast import (
    FULL_DAY_HOURS,
    PREDICTION_COLUMNS,
    CellChoice,
    DesignMatrix,
    FeatureSpec,
    ForecastReport,
    Method,
    ModelSpec,
    Scope,
    StationScore,
)
from edgemind.models.telemetry import EventLog, StationSeries
from edgemind.telemetry import bin_user_counts
from edgemind.utils.calendar_utils import Calendar

logger = logging.getLogger(__name__)

METHOD_SCOPES: Dict[Method, Tuple[Scope, ...]] = {
    Method.BRR: (Scope.LOCAL,),
    Method.GPR: (Scope.LOCAL, Scope.CLUSTER),
    Method.RFR: (Scope.LOCAL, Scope.CLUSTER),
    Method.ARMA: (Scope.LOCAL,),
}

# ARMA rows do not depend on a feature window.
ARMA_WINDOW = 0


@dataclass(frozen=True)
class ExperimentPlan:
    """Grid, split and model settings of one forecasting experiment."""

    train_end: dt.datetime
    lookaheads: Tuple[int, ...] = tuple(range(1, 10))
    windows: Tuple[int, ...] = tuple(range(1, 11))
    methods: Tuple[Method, ...] = tuple(Method)
    scopes: Tuple[Scope, ...] = tuple(Scope)
    bin_s: int = 300
    hours: Tuple[int, ...] = FULL_DAY_HOURS
    weekday_flag: bool = True
    window_policy: str = "fixed"
    clusters: Optional[Tuple[int, ...]] = None
    train_start: Optional[dt.datetime] = None
    test_end: Optional[dt.datetime] = None
    folds: int = 3
    seed: int = 0
    rf_trees: int = DEFAULT_RF_TREES
    full_rf_grid: bool = False
    max_train_rows: Optional[int] = None
    n_jobs: int = 1
    keep_predictions: bool = False

    def __post_init__(self) -> None:
        if self.window_policy not in ("fixed", "select"):
            raise ConfigError(f"window_policy must be 'fixed' or 'select', got {self.window_policy!r}")
        if not self.lookaheads or not self.windows or not self.methods:
            raise ConfigError("lookaheads, windows and methods must be non-empty")
        if self.test_end is not None and self.test_end <= self.train_end:
            raise ConfigError("test_end must be after train_end")
        if self.train_start is not None and self.train_start >= self.train_end:
            raise ConfigError("train_start must be before train_end")


@dataclass(frozen=True)
class _Bounds:
    start_bin: Optional[int]
    cutoff_bin: int
    end_bin: Optional[int]


def _bounds(calendar: Calendar, plan: ExperimentPlan) -> _Bounds:
    return _Bounds(
        start_bin=calendar.bin_of(plan.train_start) if plan.train_start else None,
        cutoff_bin=calendar.bin_of(plan.train_end),
        end_bin=calendar.bin_of(plan.test_end) if plan.test_end else None,
    )


def split_design(dm: DesignMatrix, bounds: _Bounds, plan: ExperimentPlan, guard: LeakageGuard) -> Tuple[DesignMatrix, DesignMatrix]:
    """Chronological train/test split honoring the plan's start, cutoff, end and row cap."""
    train, test = dm.split_at(bounds.cutoff_bin, bounds.end_bin)
    if bounds.start_bin is not None:
        train = train.take(train.first_feature_bins >= bounds.start_bin)
    if plan.max_train_rows is not None and train.n_rows > plan.max_train_rows:
        keep = np.zeros(train.n_rows, dtype=bool)
        keep[-plan.max_train_rows :] = True
        train = train.take(keep)
    guard.check_rows(train.target_bins, "train split")
    if train.n_rows <= plan.folds or test.n_rows == 0:
        raise InsufficientData(
            f"W={dm.spec.window}, L={dm.spec.lookahead}: {train.n_rows} train and {test.n_rows} test rows"
        )
    return train, test


@dataclass
class _Candidate:
    window: int
    train: DesignMatrix
    test: DesignMatrix
    selection: Selection


def _candidates(method: Method, members: Sequence[StationSeries], calendar: Calendar, lookahead: int, plan: ExperimentPlan, bounds: _Bounds, guard: LeakageGuard) -> List[_Candidate]:
    grid = default_grid(method, plan.rf_trees, plan.full_rf_grid)
    candidates = []
    for window in plan.windows:
        spec = FeatureSpec(window, lookahead, plan.bin_s, plan.hours, plan.weekday_flag)
        try:
            train, test = split_design(build_cluster(members, calendar, spec), bounds, plan, guard)
        except InsufficientData as e:
            logger.warning("Skipping %s cell: %s", method.value, e)
            continue
        selection = cv_select(
            method, grid, train.X, train.Y, plan.folds, train.count_columns,
            plan.seed, plan.n_jobs, guard, score_single=plan.window_policy == "select",
        )
        candidates.append(_Candidate(window, train, test, selection))
    if not candidates:
        raise InsufficientData(
            f"no usable window for {method.value} at L={lookahead} on stations {[s.station for s in members]}"
        )
    if plan.window_policy == "select":
        best = min(range(len(candidates)), key=lambda i: (candidates[i].selection.score, i))
        return [candidates[best]]
    return candidates


def _prediction_frame(method: Method, scope: Scope, cluster: int, lookahead: int, window: int, test: DesignMatrix, prediction: np.ndarray, members: Sequence[StationSeries]) -> pd.DataFrame:
    by_station = {s.station: s for s in members}
    frames = []
    for column, station in enumerate(test.stations):
        series = by_station[station]
        position = np.searchsorted(series.bins, test.target_bins)
        frames.append(pd.DataFrame({
            "method": method.value,
            "scope": scope.value,
            "cluster": cluster,
            "L": lookahead,
            "W": window,
            "station": station,
            "target_bin": test.target_bins,
            "n_true": test.Y[:, column],
            "n_pred": prediction[:, column],
            "n_previous": np.asarray(series.n_ue, dtype=float)[position - 1],
        }))
    return pd.concat(frames, ignore_index=True)


def _evaluate_regressor(method: Method, scope: Scope, cluster: int, members: Sequence[StationSeries], calendar: Calendar, plan: ExperimentPlan, bounds: _Bounds, guard: LeakageGuard) -> ForecastReport:
    report = ForecastReport()
    for lookahead in plan.lookaheads:
        for cand in _candidates(method, members, calendar, lookahead, plan, bounds, guard):
            guard.check_rows(cand.train.target_bins, "model fit")
            prediction, flags = fit_predict(
                cand.selection.spec, cand.train.X, cand.train.Y, cand.test.X,
                cand.train.count_columns, plan.seed, plan.n_jobs,
            )
            sigmas = rmse_per_column(cand.test.Y, prediction)
            if plan.keep_predictions:
                report.predictions.append(
                    _prediction_frame(method, scope, cluster, lookahead, cand.window, cand.test, prediction, members)
                )
            for station, sigma in zip(cand.test.stations, sigmas):
                report.scores.append(StationScore(method, scope, cluster, lookahead, cand.window, station, float(sigma)))
            report.choices.append(
                CellChoice(
                    method, scope, cluster, lookahead, cand.window,
                    members[0].station if scope is Scope.LOCAL else None,
                    cand.selection.spec, cand.selection.score, tuple(flags),
                )
            )
            logger.debug(
                "%s/%s cluster %d L=%d W=%d: %s mean RMSE %.4f",
                method.value, scope.value, cluster, lookahead, cand.window,
                cand.selection.spec.label(), float(np.mean(sigmas)),
            )
    return report


def _evaluate_arma(cluster: int, series: StationSeries, calendar: Calendar, plan: ExperimentPlan, bounds: _Bounds, guard: LeakageGuard) -> ForecastReport:
    report = ForecastReport()
    fit_mask = series.bins < bounds.cutoff_bin
    if bounds.start_bin is not None:
        fit_mask &= series.bins >= bounds.start_bin
    guard.check_rows(series.bins[fit_mask], "ARMA fit")
    model = fit_arma(series.n_ue[fit_mask])
    spec = ModelSpec(Method.ARMA, {"p": len(model.ar), "q": len(model.ma)})
    counts = np.asarray(series.n_ue, dtype=float)
    for lookahead in plan.lookaheads:
        feature_spec = FeatureSpec(min(plan.windows), lookahead, plan.bin_s, plan.hours, plan.weekday_flag)
        _, test = build_cluster([series], calendar, feature_spec).split_at(bounds.cutoff_bin, bounds.end_bin)
        if test.n_rows == 0:
            raise InsufficientData(f"no ARMA test rows for station {series.station} at L={lookahead}")
        prediction = forecast_at(model, counts, test.feature_bins, lookahead)
        sigma = float(rmse_per_column(test.Y, prediction[:, None])[0])
        if plan.keep_predictions:
            report.predictions.append(
                _prediction_frame(Method.ARMA, Scope.LOCAL, cluster, lookahead, ARMA_WINDOW, test, prediction[:, None], [series])
            )
        report.scores.append(StationScore(Method.ARMA, Scope.LOCAL, cluster, lookahead, ARMA_WINDOW, series.station, sigma))
        report.choices.append(
            CellChoice(Method.ARMA, Scope.LOCAL, cluster, lookahead, ARMA_WINDOW, series.station, spec, None, tuple(model.flags))
        )
    return report


def _single_cluster(n_stations: int) -> ClusterAssignment:
    return ClusterAssignment(tuple([0] * n_stations), 1, n_stations, n_stations, Strategy.GEOGRAPHIC)


def run_experiment(
    source: Union[EventLog, Mapping[int, StationSeries]],
    assignment: Optional[ClusterAssignment],
    plan: ExperimentPlan,
    epoch: Optional[dt.datetime] = None,
) -> ForecastReport:
    """
    Fit and score every (method, scope, cluster, L, W) cell of the plan.

    Args:
        source: Event trace, or per-station series already binned at ``plan.bin_s``
        assignment: Station to controller map; None treats all stations as one cluster
        plan: Experiment grid and split
        epoch: Calendar origin of the series (taken from the trace when ``source`` is an EventLog)

    Returns:
        ForecastReport with per-station RMSE on the test span and the chosen hyperparameters
    """
    if isinstance(source, EventLog):
        series = bin_user_counts(source, plan.bin_s)
        epoch = source.epoch
    else:
        series = dict(source)
        if epoch is None:
            raise ConfigError("epoch is required when passing binned series")
    calendar = Calendar(epoch, plan.bin_s)
    bounds = _bounds(calendar, plan)
    guard = LeakageGuard(bounds.cutoff_bin)
    assignment = assignment or _single_cluster(len(series))
    if len(assignment.labels) != len(series):
        raise ConfigError(f"assignment covers {len(assignment.labels)} stations, series cover {len(series)}")
    clusters = plan.clusters if plan.clusters is not None else tuple(range(assignment.n_clusters))

    report = ForecastReport()
    for method in plan.methods:
        for scope in METHOD_SCOPES[method]:
            if scope not in plan.scopes:
                continue
            for cluster in clusters:
                members = [series[i] for i in assignment.members(cluster)]
                if not members:
                    continue
                if method is Method.ARMA:
                    for s in members:
                        report.extend(_evaluate_arma(cluster, s, calendar, plan, bounds, guard))
                elif scope is Scope.LOCAL:
                    for s in members:
                        report.extend(_evaluate_regressor(method, scope, cluster, [s], calendar, plan, bounds, guard))
                else:
                    report.extend(_evaluate_regressor(method, scope, cluster, members, calendar, plan, bounds, guard))
                logger.info("Finished %s/%s for cluster %d", method.value, scope.value, cluster)
    logger.info("Forecast experiment done: %d scores, %d leakage checks", len(report.scores), guard.checks)
    report.leakage_checks = guard.checks
    return report


def rmse_reduction(
    report: ForecastReport,
    baseline: Tuple[Method, Scope] = (Method.BRR, Scope.LOCAL),
    candidate: Tuple[Method, Scope] = (Method.GPR, Scope.CLUSTER),
) -> pd.DataFrame:
    """
    Percent reduction of the aggregate RMSE of ``candidate`` relative to
    ``baseline`` at every look-ahead both cover (best W for each).
    """
    frame = report.to_frame()
    lookaheads = sorted(int(L) for L in frame["L"].unique())
    rows = []
    for lookahead in lookaheads:
        try:
            base = report.sigma_hat(baseline[0], baseline[1], lookahead)
            cand = report.sigma_hat(candidate[0], candidate[1], lookahead)
        except KeyError:
            continue
        reduction = 100.0 * (base - cand) / base if base > 0 else float("nan")
        rows.append({"L": lookahead, "sigma_baseline": base, "sigma_candidate": cand, "reduction_pct": reduction})
    return pd.DataFrame(rows, columns=["L", "sigma_baseline", "sigma_candidate", "reduction_pct"])


RESIDUAL_COLUMNS = [
    "method", "scope", "L", "W", "previous_lo", "previous_hi", "n",
    "residual_mean", "residual_std", "residual_min", "residual_max",
]


def residual_analysis(predictions: pd.DataFrame, n_bins: int = 100) -> pd.DataFrame:
    """
    Residuals N_u(t) - N̂_u(t) grouped by the true count N_u(t-1).

    The previous count is cut into ``n_bins`` equal-width bins per
    (method, scope, L, W); empty bins are dropped.
    """
    if n_bins < 1:
        raise ConfigError(f"n_bins must be at least 1, got {n_bins}")
    missing = set(PREDICTION_COLUMNS) - set(predictions.columns)
    if missing:
        raise ConfigError(f"prediction table lacks columns {sorted(missing)}")
    if predictions.empty:
        return pd.DataFrame(columns=RESIDUAL_COLUMNS)

    frame = predictions.assign(residual=predictions["n_true"] - predictions["n_pred"])
    rows = []
    for (method, scope, lookahead, window), group in frame.groupby(["method", "scope", "L", "W"], sort=True):
        quantized = pd.cut(group["n_previous"].astype(float), bins=n_bins)
        stats = group.groupby(quantized, observed=True)["residual"].agg(["count", "mean", "std", "min", "max"])
        for interval, row in stats.iterrows():
            rows.append({
                "method": method,
                "scope": scope,
                "L": lookahead,
                "W": window,
                "previous_lo": float(interval.left),
                "previous_hi": float(interval.right),
                "n": int(row["count"]),
                "residual_mean": row["mean"],
                "residual_std": row["std"],
                "residual_min": row["min"],
                "residual_max": row["max"],
            })
    return pd.DataFrame(rows, columns=RESIDUAL_COLUMNS)


def training_size_sweep(
    source: Union[EventLog, Mapping[int, StationSeries]],
    assignment: Optional[ClusterAssignment],
    plan: ExperimentPlan,
    train_hours: Sequence[float] = (25, 50, 75, 100),
    epoch: Optional[dt.datetime] = None,
) -> pd.DataFrame:
    """
    Rerun the experiment on the last ``h`` hours before ``train_end`` for
    every ``h`` in ``train_hours``; the test span stays fixed.

    Returns:
        The aggregate table of each run with a leading ``train_hours`` column
    """
    if not train_hours or any(h <= 0 for h in train_hours):
        raise ConfigError(f"train_hours must be positive, got {list(train_hours)}")
    frames = []
    for hours in sorted(train_hours):
        start = plan.train_end - dt.timedelta(hours=hours)
        if plan.train_start is not None and start < plan.train_start:
            logger.warning("Training size %g h reaches before train_start; using %s", hours, plan.train_start)
            start = plan.train_start
        report = run_experiment(source, assignment, replace(plan, train_start=start, keep_predictions=False), epoch)
        frame = report.aggregate()
        frame.insert(0, "train_hours", float(hours))
        frames.append(frame)
        logger.info("Training size %g h: %d cells", hours, len(frame))
    return pd.concat(frames, ignore_index=True)
