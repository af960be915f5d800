from edgemind.forecast.arma import ArmaModel, arma_forecast, fit_arma
from edgemind.forecast.direct import DirectForecaster
from edgemind.forecast.experiment import (
    METHOD_SCOPES,
    ExperimentPlan,
    residual_analysis,
    rmse_reduction,
    run_experiment,
    training_size_sweep,
)
from edgemind.forecast.features import build_cluster, build_local
from edgemind.forecast.regressors import BayesianRidge, GaussianProcess, RandomForest, forecast_kernel, make_regressor
from edgemind.forecast.selection import aggregate, cv_select, default_grid, expanding_splits, rmse
from edgemind.forecast.transform import FeatureTransform, LeakageGuard, apply_transform, fit_transform

__all__ = [
    "METHOD_SCOPES",
    "ArmaModel",
    "BayesianRidge",
    "DirectForecaster",
    "ExperimentPlan",
    "FeatureTransform",
    "GaussianProcess",
    "LeakageGuard",
    "RandomForest",
    "aggregate",
    "apply_transform",
    "arma_forecast",
    "build_cluster",
    "build_local",
    "cv_select",
    "default_grid",
    "expanding_splits",
    "fit_arma",
    "fit_transform",
    "forecast_kernel",
    "make_regressor",
    "residual_analysis",
    "rmse",
    "rmse_reduction",
    "run_experiment",
    "training_size_sweep",
]
