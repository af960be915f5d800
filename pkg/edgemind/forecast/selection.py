"""Hyperparameter grids and expanding-window cross-validation."""
import itertools
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from sklearn.metrics import mean_squared_error
from sklearn.model_selection import TimeSeriesSplit

from edgemind.errors import ConfigError, InsufficientData, ShapeError
from edgemind.forecast.regressors import make_regressor
from edgemind.forecast.transform import LeakageGuard, fit_transform
from edgemind.models.forecast import Method, ModelSpec

logger = logging.getLogger(__name__)

BRR_PRECISIONS = (1e-6, 1e-3, 1.0, 10.0, 100.0)
GPR_ALPHAS = (1e-6, 1e-4, 1e-2, 0.1)
GPR_SIGMAS = (0.001, 0.01)
RFR_FULL_GRID = (1000, 5000, 10000)
DEFAULT_RF_TREES = 200


def default_grid(method: Method, rf_trees: int = DEFAULT_RF_TREES, full_rf_grid: bool = False) -> List[ModelSpec]:
    """Grid points in declared order; the first one wins CV ties."""
    method = Method(method)
    if method is Method.BRR:
        return [ModelSpec(method, {"alpha": a, "lambda": lam}) for a, lam in itertools.product(BRR_PRECISIONS, BRR_PRECISIONS)]
    if method is Method.GPR:
        return [ModelSpec(method, {"alpha": a, "sigma_k": s}) for a, s in itertools.product(GPR_ALPHAS, GPR_SIGMAS)]
    if method is Method.RFR:
        trees = RFR_FULL_GRID if full_rf_grid else (rf_trees,)
        return [ModelSpec(method, {"n_trees": n}) for n in trees]
    return [ModelSpec(method, {"p": 4, "q": 2})]


def rmse(y: np.ndarray, y_hat: np.ndarray) -> float:
    """Root mean squared error over all entries."""
    y = np.asarray(y, dtype=float)
    y_hat = np.asarray(y_hat, dtype=float)
    if y.shape != y_hat.shape:
        raise ShapeError(f"shape mismatch: {y.shape} vs {y_hat.shape}")
    if y.size == 0:
        raise ShapeError("RMSE of an empty sample")
    return float(np.sqrt(mean_squared_error(y.ravel(), y_hat.ravel())))


def rmse_per_column(Y: np.ndarray, Y_hat: np.ndarray) -> np.ndarray:
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    Y_hat = np.atleast_2d(np.asarray(Y_hat, dtype=float))
    if Y.shape != Y_hat.shape:
        raise ShapeError(f"shape mismatch: {Y.shape} vs {Y_hat.shape}")
    return np.sqrt(((Y - Y_hat) ** 2).mean(axis=0))


def aggregate(sigmas: Sequence[float]) -> float:
    """Cluster RMSE: the arithmetic mean of the member RMSEs."""
    if len(sigmas) == 0:
        raise ShapeError("no member RMSE to aggregate")
    return float(np.mean(sigmas))


def expanding_splits(n_rows: int, folds: int) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Chronological splits: each fold trains on a prefix and validates on the following block."""
    if folds < 2:
        raise ConfigError(f"folds must be >= 2, got {folds}")
    if n_rows <= folds:
        raise InsufficientData(f"{n_rows} training rows cannot be split into {folds} folds")
    return list(TimeSeriesSplit(n_splits=folds).split(np.arange(n_rows)))


def fit_predict(spec: ModelSpec, X_train: np.ndarray, Y_train: np.ndarray, X_eval: np.ndarray, count_columns: Optional[np.ndarray] = None, seed: int = 0, n_jobs: int = 1) -> Tuple[np.ndarray, List[str]]:
    """Fit the transform and the model on training rows; predict on the count scale."""
    transform = fit_transform(X_train, Y_train, count_columns)
    model = make_regressor(spec, seed=seed, n_jobs=n_jobs)
    model.fit(transform.transform_x(X_train), transform.transform_y(Y_train))
    return transform.inverse_y(model.predict(transform.transform_x(X_eval))), list(model.flags)


@dataclass(frozen=True)
class Selection:
    spec: ModelSpec
    score: Optional[float]
    scores: Tuple[Optional[float], ...]


def cv_select(
    method: Method,
    grid: Sequence[ModelSpec],
    X: np.ndarray,
    Y: np.ndarray,
    folds: int = 3,
    count_columns: Optional[np.ndarray] = None,
    seed: int = 0,
    n_jobs: int = 1,
    guard: Optional[LeakageGuard] = None,
    score_single: bool = False,
) -> Selection:
    """
    Pick the grid point with the lowest mean validation RMSE.

    Every fold refits the transform on its own training prefix and scores
    on the count scale. A single grid point is returned without fitting
    unless ``score_single`` asks for its CV score.

    Args:
        method: Regressor family
        grid: Candidate ModelSpecs in declared order
        X: Training features (unscaled)
        Y: Training targets (counts)
        folds: Number of expanding-window folds

    Returns:
        Selection holding the winner and every grid point's score
    """
    if not grid:
        raise ConfigError(f"empty hyperparameter grid for {Method(method).value}")
    if len(grid) == 1 and not score_single:
        return Selection(grid[0], None, (None,))

    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    splits = expanding_splits(len(X), folds)
    if guard is not None:
        for train_index, valid_index in splits:
            guard.check_folds(train_index, valid_index)

    scores: List[Optional[float]] = []
    for spec in grid:
        fold_scores = []
        for train_index, valid_index in splits:
            prediction, _ = fit_predict(spec, X[train_index], Y[train_index], X[valid_index], count_columns, seed, n_jobs)
            fold_scores.append(rmse(Y[valid_index], prediction))
        scores.append(float(np.mean(fold_scores)))
        logger.debug("CV %s: %.6g", spec.label(), scores[-1])

    best = min(range(len(grid)), key=lambda i: (scores[i], i))
    return Selection(grid[best], scores[best], tuple(scores))
