"""ARIMA(p, 1, q) forecasts with Hannan-Rissanen estimation."""
import logging
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
from scipy.signal import lfilter
from statsmodels.tsa.arima.estimators.hannan_rissanen import hannan_rissanen

from edgemind.errors import ConfigError, InsufficientData, NonStationary

logger = logging.getLogger(__name__)

DEFAULT_AR_ORDER = 4
DEFAULT_MA_ORDER = 2
# Residual magnitude, relative to the differenced series spread, treated as divergence.
DIVERGENCE_FACTOR = 1e6


@dataclass
class ArmaModel:
    """ARMA coefficients of the once-differenced series plus its mean (the drift)."""

    ar: np.ndarray
    ma: np.ndarray
    mean: float
    scale: float = 1.0
    flags: List[str] = field(default_factory=list)

    @property
    def persistence(self) -> bool:
        return "persistence" in self.flags

    def residuals(self, diffs: np.ndarray) -> np.ndarray:
        """One-step innovations of the demeaned differenced series."""
        centered = diffs - self.mean
        return lfilter(np.r_[1.0, -self.ar], np.r_[1.0, self.ma], centered)

    def _diverged(self, residuals: np.ndarray) -> bool:
        return (not np.all(np.isfinite(residuals))) or bool(np.max(np.abs(residuals), initial=0.0) > DIVERGENCE_FACTOR * self.scale)

    def forecast(self, history: np.ndarray, steps: int) -> np.ndarray:
        """
        Forecast the ``steps`` values following ``history``.

        Returns:
            Array of length ``steps`` on the level scale
        """
        history = np.asarray(history, dtype=float)
        if steps < 1:
            raise ConfigError(f"steps must be >= 1, got {steps}")
        if len(history) == 0:
            raise InsufficientData("cannot forecast from an empty history")
        if self.persistence or len(history) < 2:
            return np.full(steps, history[-1])

        diffs = np.diff(history)
        resid = self.residuals(diffs)
        if self._diverged(resid):
            raise NonStationary("ARMA innovations diverge on this history")
        p, q = len(self.ar), len(self.ma)
        z = list(diffs[-p:] - self.mean) if p else []
        e = list(resid[-q:]) if q else []
        z = [0.0] * (p - len(z)) + z
        e = [0.0] * (q - len(e)) + e
        path = []
        for _ in range(steps):
            step = float(np.dot(self.ar, z[::-1][:p])) + float(np.dot(self.ma, e[::-1][:q]))
            path.append(step + self.mean)
            if p:
                z = z[1:] + [step]
            if q:
                e = e[1:] + [0.0]
        levels = history[-1] + np.cumsum(path)
        if not np.all(np.isfinite(levels)):
            raise NonStationary("ARMA forecast is not finite")
        return levels


def fit_arma(series: np.ndarray, p: int = DEFAULT_AR_ORDER, q: int = DEFAULT_MA_ORDER) -> ArmaModel:
    """
    Fit ARMA(p, q) to the first difference of ``series``.

    A constant difference (constant or linearly ramping series) yields a
    pure drift model. When the estimate fails or its innovations diverge
    the model falls back to persistence and is flagged.
    """
    series = np.asarray(series, dtype=float)
    if p < 0 or q < 0:
        raise ConfigError(f"ARMA orders must be non-negative, got p={p}, q={q}")
    diffs = np.diff(series)
    if len(diffs) == 0:
        raise InsufficientData("ARMA needs at least two samples")
    mean = float(diffs.mean())
    spread = float(diffs.std())
    if spread == 0.0:
        return ArmaModel(np.zeros(p), np.zeros(q), mean, 1.0, ["drift"])
    if len(diffs) <= 2 * (p + q) + 10:
        logger.warning("Series of %d samples too short for ARMA(%d, %d); using persistence", len(series), p, q)
        return ArmaModel(np.zeros(p), np.zeros(q), 0.0, spread, ["persistence"])

    try:
        params, _ = hannan_rissanen(diffs - mean, ar_order=p, ma_order=q, demean=False)
        model = ArmaModel(np.asarray(params.ar_params, dtype=float), np.asarray(params.ma_params, dtype=float), mean, spread)
        if model._diverged(model.residuals(diffs)):
            raise NonStationary("innovations diverge on the training series")
    except (ValueError, np.linalg.LinAlgError, NonStationary) as e:
        logger.warning("ARMA(%d, %d) fit failed (%s); using persistence", p, q, e)
        return ArmaModel(np.zeros(p), np.zeros(q), 0.0, spread, ["persistence"])
    return model


@dataclass(frozen=True)
class ArmaForecast:
    values: np.ndarray
    flags: Tuple[str, ...]


def arma_forecast(series: np.ndarray, lookahead: int, p: int = DEFAULT_AR_ORDER, q: int = DEFAULT_MA_ORDER) -> ArmaForecast:
    """
    Fit on ``series`` and forecast the next ``lookahead`` values.

    Args:
        series: User counts in time order
        lookahead: Number of steps L to forecast
        p: AR order
        q: MA order

    Returns:
        ArmaForecast whose ``values[-1]`` is the L-step-ahead forecast
    """
    model = fit_arma(series, p, q)
    try:
        values = model.forecast(series, lookahead)
    except NonStationary as e:
        logger.warning("ARMA forecast diverged (%s); using persistence", e)
        model.flags.append("persistence")
        values = np.full(lookahead, float(np.asarray(series)[-1]))
    return ArmaForecast(values, tuple(model.flags))


def forecast_at(model: ArmaModel, series: np.ndarray, origins: np.ndarray, lookahead: int) -> np.ndarray:
    """L-step-ahead forecasts from each origin index, using history up to and including it."""
    series = np.asarray(series, dtype=float)
    out = np.empty(len(origins))
    for row, origin in enumerate(origins):
        history = series[: int(origin) + 1]
        try:
            out[row] = model.forecast(history, lookahead)[-1]
        except NonStationary:
            if "persistence" not in model.flags:
                logger.warning("ARMA forecast diverged at origin %d; using persistence", origin)
                model.flags.append("persistence")
            out[row] = history[-1]
    return out
