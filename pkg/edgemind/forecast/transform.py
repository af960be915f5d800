"""log(1+x) and min-max scaling fitted on training rows only."""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from edgemind.errors import LeakageError, ShapeError
from edgemind.models.forecast import DesignMatrix

logger = logging.getLogger(__name__)


class LeakageGuard:
    """
    Asserts that nothing at or after the train/test cutoff reaches a fit.

    ``checks`` counts the assertions made, so callers can verify the guard
    actually ran.
    """

    def __init__(self, cutoff_bin: int):
        self.cutoff_bin = cutoff_bin
        self.checks = 0

    def check_rows(self, target_bins: np.ndarray, stage: str) -> None:
        self.checks += 1
        if len(target_bins) and int(np.max(target_bins)) >= self.cutoff_bin:
            raise LeakageError(
                f"{stage} saw a target at bin {int(np.max(target_bins))}, cutoff is bin {self.cutoff_bin}"
            )

    def check_folds(self, train_index: np.ndarray, valid_index: np.ndarray) -> None:
        self.checks += 1
        if len(train_index) and len(valid_index) and train_index.max() >= valid_index.min():
            raise LeakageError("cross-validation fold validates on rows that precede its training rows")


@dataclass(frozen=True)
class FeatureTransform:
    log_x: np.ndarray
    x_min: np.ndarray
    x_max: np.ndarray
    y_min: np.ndarray
    y_max: np.ndarray
    degenerate_x: Tuple[int, ...] = ()
    degenerate_y: Tuple[int, ...] = ()

    @staticmethod
    def _scale(values: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        span = hi - lo
        safe = np.where(span > 0, span, 1.0)
        return np.where(span > 0, (values - lo) / safe, 0.0)

    @staticmethod
    def _unscale(values: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        return np.where(hi > lo, values * (hi - lo) + lo, lo)

    def transform_x(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.shape[1] != len(self.x_min):
            raise ShapeError(f"expected {len(self.x_min)} feature columns, got {X.shape[1]}")
        logged = np.where(self.log_x, np.log1p(np.where(self.log_x, X, 0.0)), X)
        return self._scale(logged, self.x_min, self.x_max)

    def transform_y(self, Y: np.ndarray) -> np.ndarray:
        Y = np.asarray(Y, dtype=float)
        if Y.shape[1] != len(self.y_min):
            raise ShapeError(f"expected {len(self.y_min)} target columns, got {Y.shape[1]}")
        return self._scale(np.log1p(Y), self.y_min, self.y_max)

    def inverse_x(self, Xs: np.ndarray) -> np.ndarray:
        values = self._unscale(np.asarray(Xs, dtype=float), self.x_min, self.x_max)
        return np.where(self.log_x, np.expm1(values), values)

    def inverse_y(self, Ys: np.ndarray) -> np.ndarray:
        return np.expm1(self._unscale(np.asarray(Ys, dtype=float), self.y_min, self.y_max))


def fit_transform(X: np.ndarray, Y: np.ndarray, count_columns: Optional[np.ndarray] = None) -> FeatureTransform:
    """
    Fit the per-feature transform on training rows.

    Count features (``count_columns``) and every target column go through
    log(1+x) before min-max scaling; calendar features are only scaled.
    Columns with min == max map to 0 and are recorded as degenerate.

    Args:
        X: Training features
        Y: Training targets (user counts)
        count_columns: Boolean mask of the count columns of X (all False if omitted)

    Returns:
        Fitted FeatureTransform
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.ndim != 2 or Y.ndim != 2 or len(X) != len(Y):
        raise ShapeError(f"X {X.shape} and Y {Y.shape} must be 2-D with matching rows")
    if len(X) == 0:
        raise ShapeError("cannot fit a transform on zero training rows")
    log_x = np.zeros(X.shape[1], dtype=bool) if count_columns is None else np.asarray(count_columns, dtype=bool)
    if len(log_x) != X.shape[1]:
        raise ShapeError(f"count mask has {len(log_x)} entries for {X.shape[1]} columns")

    logged_x = np.where(log_x, np.log1p(np.where(log_x, X, 0.0)), X)
    logged_y = np.log1p(Y)
    x_min, x_max = logged_x.min(axis=0), logged_x.max(axis=0)
    y_min, y_max = logged_y.min(axis=0), logged_y.max(axis=0)
    degenerate_x = tuple(int(i) for i in np.flatnonzero(x_max <= x_min))
    degenerate_y = tuple(int(i) for i in np.flatnonzero(y_max <= y_min))
    if degenerate_x or degenerate_y:
        logger.warning("Constant training columns mapped to 0: features %s, targets %s", degenerate_x, degenerate_y)
    return FeatureTransform(log_x, x_min, x_max, y_min, y_max, degenerate_x, degenerate_y)


def apply_transform(transform: FeatureTransform, X: np.ndarray, Y: Optional[np.ndarray] = None) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    return transform.transform_x(X), None if Y is None else transform.transform_y(Y)


def fit_design(train: DesignMatrix, guard: Optional[LeakageGuard] = None) -> FeatureTransform:
    """Fit the transform on a training DesignMatrix, checked by ``guard``."""
    if guard is not None:
        guard.check_rows(train.target_bins, "transform fit")
    return fit_transform(train.X, train.Y, train.count_columns)
