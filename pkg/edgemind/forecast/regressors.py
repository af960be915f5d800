"""The regressors compared by the forecast experiments.

All models take a feature matrix X (M x F) and a target matrix Y (M x T)
and predict T columns, so local (T = 1) and cluster (T = N) models share
one interface.
"""
import logging
import warnings
from typing import Any, List, Mapping, Optional, Tuple

import numpy as np
from scipy import linalg
from scipy.spatial.distance import cdist
from sklearn.ensemble import RandomForestRegressor
from sklearn.gaussian_process import GaussianProcessRegressor
from sklearn.gaussian_process.kernels import DotProduct, Kernel, RationalQuadratic, WhiteKernel
from sklearn.linear_model import Ridge

from edgemind.errors import CholeskyError, ConfigError, ShapeError, SingularMatrix
from edgemind.models.forecast import Method, ModelSpec

logger = logging.getLogger(__name__)

GPR_MAX_RETRIES = 3
BRR_JITTER = 1e-10


def _as_2d(Y: np.ndarray) -> np.ndarray:
    Y = np.asarray(Y, dtype=float)
    return Y[:, None] if Y.ndim == 1 else Y


def _check_rows(X: np.ndarray, Y: np.ndarray) -> None:
    if X.ndim != 2 or len(X) != len(Y):
        raise ShapeError(f"X {X.shape} and Y {Y.shape} must have matching rows")
    if len(X) == 0:
        raise ShapeError("cannot fit on zero rows")


def invert_precision(precision: np.ndarray) -> Tuple[np.ndarray, bool]:
    """
    Invert a posterior precision matrix, retrying once with BRR_JITTER * I.

    Returns:
        The inverse and whether the jitter was needed

    Raises:
        SingularMatrix: Non-finite entries, or still singular after the jitter
    """
    if not np.isfinite(precision).all():
        raise SingularMatrix("posterior precision has non-finite entries")
    try:
        return linalg.inv(precision, check_finite=False), False
    except linalg.LinAlgError:
        pass
    try:
        return linalg.inv(precision + BRR_JITTER * np.eye(len(precision)), check_finite=False), True
    except linalg.LinAlgError as e:
        raise SingularMatrix(f"posterior precision singular after {BRR_JITTER:g} jitter: {e}") from e


class Regressor:
    """Base class; subclasses set ``flags`` for conditions resolved during fitting."""

    def __init__(self) -> None:
        self.flags: List[str] = []

    def fit(self, X: np.ndarray, Y: np.ndarray) -> "Regressor":
        raise NotImplementedError

    def predict(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class BayesianRidge(Regressor):
    """
    Bayesian ridge regression with fixed noise precision ``alpha`` and
    weight precision ``lambda_``.

    The posterior mean is the ridge solution with penalty lambda_/alpha on
    centered data; ``predict_std`` adds the posterior predictive spread.
    """

    def __init__(self, alpha: float, lambda_: float):
        super().__init__()
        if alpha <= 0 or lambda_ <= 0:
            raise ConfigError(f"BRR precisions must be positive, got alpha={alpha}, lambda={lambda_}")
        self.alpha = alpha
        self.lambda_ = lambda_
        self._ridge = Ridge(alpha=lambda_ / alpha, fit_intercept=True, solver="cholesky")
        self._x_mean: Optional[np.ndarray] = None
        self._covariance: Optional[np.ndarray] = None

    @property
    def coef_(self) -> np.ndarray:
        return np.atleast_2d(self._ridge.coef_)

    @property
    def intercept_(self) -> np.ndarray:
        return np.atleast_1d(self._ridge.intercept_)

    def fit(self, X: np.ndarray, Y: np.ndarray) -> "BayesianRidge":
        X = np.asarray(X, dtype=float)
        Y = _as_2d(Y)
        _check_rows(X, Y)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", linalg.LinAlgWarning)
            self._ridge.fit(X, Y)
        if any(issubclass(w.category, linalg.LinAlgWarning) for w in caught):
            self.flags.append("ill-conditioned")
            logger.warning("BRR normal equations ill-conditioned for alpha=%g, lambda=%g", self.alpha, self.lambda_)

        self._x_mean = X.mean(axis=0)
        centered = X - self._x_mean
        precision = self.alpha * centered.T @ centered + self.lambda_ * np.eye(X.shape[1])
        self._covariance, jittered = invert_precision(precision)
        if jittered:
            self.flags.append("jitter")
            logger.warning("BRR posterior precision singular; added %g jitter", BRR_JITTER)
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        return _as_2d(self._ridge.predict(np.asarray(X, dtype=float)))

    def predict_std(self, X: np.ndarray) -> np.ndarray:
        """Posterior predictive standard deviation, one value per row."""
        if self._covariance is None or self._x_mean is None:
            raise ConfigError("predict_std called before fit")
        centered = np.asarray(X, dtype=float) - self._x_mean
        variance = 1.0 / self.alpha + np.einsum("ij,jk,ik->i", centered, self._covariance, centered)
        return np.sqrt(variance)


class MatchingWhiteKernel(WhiteKernel):
    """White kernel that also contributes ``noise_level`` between identical inputs of different sets."""

    def __call__(self, X, Y=None, eval_gradient=False):
        if Y is None:
            return super().__call__(X, None, eval_gradient)
        if eval_gradient:
            raise ValueError("Gradient can only be evaluated when Y is None.")
        return self.noise_level * (cdist(np.atleast_2d(X), np.atleast_2d(Y), "sqeuclidean") == 0).astype(float)


def forecast_kernel(sigma_k: float) -> Kernel:
    """Dot product with offset sigma_k, rational quadratic (l = 1, alpha = 1) and unit white noise, all fixed."""
    return (
        DotProduct(sigma_0=sigma_k, sigma_0_bounds="fixed")
        + RationalQuadratic(length_scale=1.0, alpha=1.0, length_scale_bounds="fixed", alpha_bounds="fixed")
        + MatchingWhiteKernel(noise_level=1.0, noise_level_bounds="fixed")
    )


class GaussianProcess(Regressor):
    """
    GP regression with the fixed forecast kernel and diagonal term ``alpha``.

    All target columns share the kernel and are solved jointly. A failed
    Cholesky factorization is retried with 10x the diagonal term up to three
    times before raising CholeskyError.
    """

    def __init__(self, alpha: float, sigma_k: float):
        super().__init__()
        if alpha <= 0:
            raise ConfigError(f"GPR alpha must be positive, got {alpha}")
        self.alpha = alpha
        self.sigma_k = sigma_k
        self.alpha_used = alpha
        self._gp: Optional[GaussianProcessRegressor] = None
        self._n_outputs = 1

    @property
    def kernel(self) -> Kernel:
        return forecast_kernel(self.sigma_k)

    def fit(self, X: np.ndarray, Y: np.ndarray) -> "GaussianProcess":
        X = np.asarray(X, dtype=float)
        Y = _as_2d(Y)
        _check_rows(X, Y)
        self._n_outputs = Y.shape[1]
        target = Y[:, 0] if self._n_outputs == 1 else Y
        alpha = self.alpha
        attempt = 0
        while True:
            gp = GaussianProcessRegressor(kernel=self.kernel, alpha=alpha, optimizer=None, normalize_y=False, copy_X_train=True)
            try:
                self._gp = gp.fit(X, target)
                self.alpha_used = alpha
                return self
            except np.linalg.LinAlgError as e:
                if attempt == GPR_MAX_RETRIES:
                    raise CholeskyError(f"Error factorizing the GP kernel matrix with alpha={alpha:g}: {str(e)}") from e
                alpha *= 10.0
                self.flags.append(f"jitter={alpha:g}")
                logger.warning("GP Cholesky failed; retrying with alpha=%g", alpha)
                attempt += 1

    def predict(self, X: np.ndarray) -> np.ndarray:
        if self._gp is None:
            raise ConfigError("predict called before fit")
        return _as_2d(self._gp.predict(np.asarray(X, dtype=float)))


class RandomForest(Regressor):
    """Bagged full-depth CART trees considering every feature at each split."""

    def __init__(self, n_trees: int, seed: int = 0, bootstrap: bool = True, n_jobs: int = 1):
        super().__init__()
        if n_trees < 1:
            raise ConfigError(f"n_trees must be >= 1, got {n_trees}")
        self._forest = RandomForestRegressor(
            n_estimators=n_trees,
            max_features=None,
            bootstrap=bootstrap,
            random_state=seed,
            n_jobs=n_jobs,
        )
        self._n_outputs = 1

    def fit(self, X: np.ndarray, Y: np.ndarray) -> "RandomForest":
        X = np.asarray(X, dtype=float)
        Y = _as_2d(Y)
        _check_rows(X, Y)
        self._n_outputs = Y.shape[1]
        self._forest.fit(X, Y[:, 0] if self._n_outputs == 1 else Y)
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        return _as_2d(self._forest.predict(np.asarray(X, dtype=float)))


def make_regressor(spec: ModelSpec, seed: int = 0, n_jobs: int = 1) -> Regressor:
    """Build the regressor a ModelSpec describes. ARMA is fitted per series, not through this factory."""
    params: Mapping[str, Any] = spec.params
    if spec.method is Method.BRR:
        return BayesianRidge(alpha=params["alpha"], lambda_=params["lambda"])
    if spec.method is Method.GPR:
        return GaussianProcess(alpha=params["alpha"], sigma_k=params["sigma_k"])
    if spec.method is Method.RFR:
        return RandomForest(n_trees=params["n_trees"], seed=seed, bootstrap=params.get("bootstrap", True), n_jobs=n_jobs)
    raise ConfigError(f"{spec.method.value} is not a feature-based regressor")
