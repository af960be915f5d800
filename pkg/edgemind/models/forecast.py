"""Types for the user-count forecasting pipeline."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Mapping, Optional, Tuple

import numpy as np
import pandas as pd

from edgemind.errors import ConfigError

FULL_DAY_HOURS: Tuple[int, ...] = tuple(range(24))
EVENING_HOURS: Tuple[int, ...] = (15, 16, 17, 18, 19)

HOUR_PRESETS: Dict[str, Tuple[int, ...]] = {
    "full-day": FULL_DAY_HOURS,
    "evening": EVENING_HOURS,
}


class Method(str, Enum):
    BRR = "BRR"
    GPR = "GPR"
    RFR = "RFR"
    ARMA = "ARMA"


class Scope(str, Enum):
    LOCAL = "local"
    CLUSTER = "cluster"


@dataclass(frozen=True)
class FeatureSpec:
    """Window W of past samples, look-ahead L and the calendar features.

    ``hours`` lists the calendar hours kept; h(t) is the position of the
    sample's hour in that list.
    """

    window: int
    lookahead: int
    bin_s: int = 300
    hours: Tuple[int, ...] = FULL_DAY_HOURS
    weekday_flag: bool = True

    def __post_init__(self) -> None:
        if self.window < 1 or self.lookahead < 1:
            raise ConfigError(f"window and lookahead must be >= 1, got W={self.window}, L={self.lookahead}")
        if self.bin_s <= 0:
            raise ConfigError(f"bin_s must be positive, got {self.bin_s}")
        if not self.hours or any(h < 0 or h > 23 for h in self.hours):
            raise ConfigError(f"hours must be calendar hours in 0..23, got {self.hours}")

    @property
    def calendar_width(self) -> int:
        return 2 if self.weekday_flag else 1


@dataclass(frozen=True)
class DesignMatrix:
    """Feature rows X and targets Y, one row per prediction time t.

    ``feature_bins`` holds t (the last feature bin) and ``target_bins`` holds
    t + L. ``count_columns`` flags the user-count columns of X.
    """

    X: np.ndarray
    Y: np.ndarray
    feature_bins: np.ndarray
    target_bins: np.ndarray
    stations: Tuple[int, ...]
    count_columns: np.ndarray
    spec: FeatureSpec
    split: Optional[str] = None

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]

    @property
    def first_feature_bins(self) -> np.ndarray:
        return self.feature_bins - (self.spec.window - 1)

    def take(self, mask: np.ndarray, split: Optional[str] = None) -> "DesignMatrix":
        return DesignMatrix(
            X=self.X[mask],
            Y=self.Y[mask],
            feature_bins=self.feature_bins[mask],
            target_bins=self.target_bins[mask],
            stations=self.stations,
            count_columns=self.count_columns,
            spec=self.spec,
            split=split if split is not None else self.split,
        )

    def split_at(self, cutoff_bin: int, end_bin: Optional[int] = None) -> Tuple["DesignMatrix", "DesignMatrix"]:
        """Chronological split: train targets before the cutoff, test features from it on."""
        train = self.target_bins < cutoff_bin
        test = self.first_feature_bins >= cutoff_bin
        if end_bin is not None:
            test &= self.target_bins < end_bin
        return self.take(train, "train"), self.take(test, "test")


@dataclass(frozen=True)
class ModelSpec:
    method: Method
    params: Mapping[str, Any] = field(default_factory=dict)

    def label(self) -> str:
        inner = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.method.value}({inner})"


@dataclass(frozen=True)
class StationScore:
    method: Method
    scope: Scope
    cluster: int
    lookahead: int
    window: int
    station: int
    sigma_b: float


@dataclass(frozen=True)
class CellChoice:
    """Hyperparameters selected for one (method, scope, cluster, L, W) cell."""

    method: Method
    scope: Scope
    cluster: int
    lookahead: int
    window: int
    station: Optional[int]
    spec: ModelSpec
    cv_rmse: Optional[float]
    flags: Tuple[str, ...] = ()


PREDICTION_COLUMNS = ["method", "scope", "cluster", "L", "W", "station", "target_bin", "n_true", "n_pred", "n_previous"]


@dataclass
class ForecastReport:
    scores: List[StationScore] = field(default_factory=list)
    choices: List[CellChoice] = field(default_factory=list)
    leakage_checks: int = 0
    # Test-span predictions, kept only when the plan asks for them.
    predictions: List[pd.DataFrame] = field(default_factory=list)

    def extend(self, other: "ForecastReport") -> None:
        self.scores.extend(other.scores)
        self.choices.extend(other.choices)
        self.predictions.extend(other.predictions)
        self.leakage_checks += other.leakage_checks

    def predictions_frame(self) -> pd.DataFrame:
        """Predicted and true counts per test row, with the true count one bin before the target."""
        if not self.predictions:
            return pd.DataFrame(columns=PREDICTION_COLUMNS)
        return pd.concat(self.predictions, ignore_index=True)[PREDICTION_COLUMNS]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    "method": s.method.value,
                    "scope": s.scope.value,
                    "cluster": s.cluster,
                    "L": s.lookahead,
                    "W": s.window,
                    "station": s.station,
                    "sigma_b": s.sigma_b,
                }
                for s in self.scores
            ],
            columns=["method", "scope", "cluster", "L", "W", "station", "sigma_b"],
        )

    def aggregate(self) -> pd.DataFrame:
        """Mean RMSE over the stations of each cell."""
        frame = self.to_frame()
        keys = ["method", "scope", "cluster", "L", "W"]
        if frame.empty:
            return pd.DataFrame(columns=keys + ["sigma_hat"])
        return (
            frame.groupby(keys, sort=True)["sigma_b"]
            .mean()
            .rename("sigma_hat")
            .reset_index()
        )

    def sigma_hat(self, method: Method, scope: Scope, lookahead: int, cluster: Optional[int] = None) -> float:
        """Aggregate RMSE for one method and scope at one L, using its best W."""
        agg = self.aggregate()
        rows = agg[(agg["method"] == method.value) & (agg["scope"] == scope.value) & (agg["L"] == lookahead)]
        if cluster is not None:
            rows = rows[rows["cluster"] == cluster]
        if rows.empty:
            raise KeyError(f"no result for {method.value}/{scope.value} at L={lookahead}")
        per_window = rows.groupby("W")["sigma_hat"].mean()
        return float(per_window.min())

    def choices_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    "method": c.method.value,
                    "scope": c.scope.value,
                    "cluster": c.cluster,
                    "L": c.lookahead,
                    "W": c.window,
                    "station": c.station,
                    "params": dict(c.spec.params),
                    "cv_rmse": c.cv_rmse,
                    "flags": list(c.flags),
                }
                for c in self.choices
            ]
        )
