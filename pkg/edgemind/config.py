"""Environment settings and run configuration models."""
from __future__ import annotations

import datetime as dt
import os
from dataclasses import dataclass
from typing import Any, Dict, List, Literal, Optional, Tuple, Type, TypeVar, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError, field_validator

from edgemind.errors import ConfigError
from edgemind.models.clustering import Strategy
from edgemind.models.forecast import HOUR_PRESETS, Method, Scope
from edgemind.models.routing import Leg, Route
from edgemind.models.telemetry import DEFAULT_EPOCH
from edgemind.utils.file_handler import load_structured_file

TableFormat = Literal["csv", "xlsx"]


@dataclass(frozen=True)
class Settings:
    """Defaults read from ``EDGEMIND_*`` environment variables (``.env`` is loaded by the entry point)."""

    output_dir: str = "output"
    seed: Optional[int] = None
    log_level: str = "INFO"
    rf_trees: int = 200
    n_jobs: int = 1
    table_format: str = "csv"

    @classmethod
    def from_env(cls) -> "Settings":
        seed = os.getenv("EDGEMIND_SEED")
        try:
            return cls(
                output_dir=os.getenv("EDGEMIND_OUTPUT_DIR", "output"),
                seed=int(seed) if seed not in (None, "") else None,
                log_level=os.getenv("EDGEMIND_LOG_LEVEL", "INFO").upper(),
                rf_trees=int(os.getenv("EDGEMIND_RF_TREES", "200")),
                n_jobs=int(os.getenv("EDGEMIND_N_JOBS", "1")),
                table_format=os.getenv("EDGEMIND_TABLE_FORMAT", "csv").lower(),
            )
        except ValueError as e:
            raise ConfigError(f"Invalid EDGEMIND_* environment value: {e}") from e


class RunConfig(BaseModel):
    """Fields shared by every subcommand's config file."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    seed: Optional[int] = Field(None, ge=0, lt=2**64)
    out: Optional[str] = None
    table_format: Optional[TableFormat] = None


class SimulateRunConfig(RunConfig):
    preset: Optional[str] = None
    simulation: Dict[str, Any] = Field(default_factory=dict)


class TraceRunConfig(RunConfig):
    events: str
    stations: str
    epoch: dt.datetime = DEFAULT_EPOCH
    duration_s: Optional[int] = Field(None, gt=0)


class ClusterRunConfig(TraceRunConfig):
    n_clusters: int = Field(ge=1)
    strategy: Strategy = Strategy.DATA_DRIVEN
    window_start: int = Field(0, ge=0)
    window_len: Optional[int] = Field(None, gt=0)
    min_size: Optional[int] = Field(None, ge=0)
    max_size: Optional[int] = Field(None, ge=1)
    restarts: int = Field(20, ge=1)
    max_iter: int = Field(100, ge=1)
    dump_matrices: bool = True


class EvalRunConfig(TraceRunConfig):
    strategies: List[Strategy] = Field(default_factory=lambda: [Strategy.DATA_DRIVEN, Strategy.GEOGRAPHIC])
    n_clusters: List[int] = Field(default_factory=lambda: [2, 4, 8, 16])
    period_s: int = Field(86400, gt=0)
    score_bin_s: Optional[int] = Field(None, gt=0)
    seeds: Optional[List[int]] = None
    n_seeds: int = Field(5, ge=2)
    datacenter: Optional[Tuple[float, float]] = None
    restarts: int = Field(20, ge=1)

    @field_validator("seeds")
    @classmethod
    def _two_seeds(cls, seeds: Optional[List[int]]) -> Optional[List[int]]:
        if seeds is not None and len(seeds) < 2:
            raise ValueError("at least two seeds are needed for confidence intervals")
        return seeds

    @field_validator("n_clusters")
    @classmethod
    def _positive_clusters(cls, values: List[int]) -> List[int]:
        if not values or min(values) < 1:
            raise ValueError("n_clusters must list positive integers")
        return values


HoursSetting = Union[str, List[int]]


def resolve_hours(hours: HoursSetting) -> Tuple[int, ...]:
    if isinstance(hours, str):
        if hours not in HOUR_PRESETS:
            raise ConfigError(f"Unknown hours preset {hours!r}; choose from {sorted(HOUR_PRESETS)}")
        return HOUR_PRESETS[hours]
    return tuple(hours)


class ForecastRunConfig(TraceRunConfig):
    assignment: Optional[str] = None
    bin_s: int = Field(300, gt=0)
    hours: HoursSetting = "full-day"
    weekday_flag: bool = True
    lookaheads: List[int] = Field(default_factory=lambda: list(range(1, 10)))
    windows: List[int] = Field(default_factory=lambda: list(range(1, 11)))
    window_policy: Literal["fixed", "select"] = "fixed"
    methods: List[Method] = Field(default_factory=lambda: list(Method))
    scopes: List[Scope] = Field(default_factory=lambda: list(Scope))
    clusters: Optional[List[int]] = None
    train_start: Optional[dt.datetime] = None
    train_end: dt.datetime
    test_end: Optional[dt.datetime] = None
    folds: int = Field(3, ge=2)
    rf_trees: Optional[int] = Field(None, ge=1)
    full_rf_grid: bool = False
    max_train_rows: Optional[int] = Field(None, ge=2)
    export_predictions: bool = False
    residual_bins: int = Field(100, ge=1)
    train_sizes_h: Optional[List[float]] = Field(None, min_length=1)

    @field_validator("train_sizes_h")
    @classmethod
    def _positive_sizes(cls, value: Optional[List[float]]) -> Optional[List[float]]:
        if value is not None and any(h <= 0 for h in value):
            raise ValueError("train_sizes_h must be positive")
        return value


class RankRunConfig(TraceRunConfig):
    routes: str
    departures: List[dt.datetime] = Field(min_length=1)
    metric: Literal["S_hat", "D_o_max"] = "S_hat"
    s_min_mbps: float = Field(1.0, ge=0)
    predictor: Literal["model", "historical"] = "model"
    method: Method = Method.GPR
    scope: Scope = Scope.CLUSTER
    assignment: Optional[str] = None
    bin_s: int = Field(300, gt=0)
    hours: HoursSetting = "full-day"
    window: int = Field(3, ge=1)
    max_lookahead: int = Field(9, ge=1)
    train_end: Optional[dt.datetime] = None
    rf_trees: Optional[int] = Field(None, ge=1)


ConfigT = TypeVar("ConfigT", bound=RunConfig)


def validate_config(model: Type[ConfigT], data: Dict[str, Any]) -> ConfigT:
    try:
        return model.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid {model.__name__}: {e}") from e


def load_run_config(model: Type[ConfigT], file_path: str) -> ConfigT:
    """Load and validate a subcommand config file; relative paths resolve against its folder."""
    data = load_structured_file(file_path)
    base_dir = os.path.dirname(os.path.abspath(file_path))
    for key in ("events", "stations", "assignment", "routes", "out"):
        value = data.get(key)
        if isinstance(value, str) and not os.path.isabs(value):
            data[key] = os.path.join(base_dir, value)
    return validate_config(model, data)


class LegConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    station: int = Field(ge=0)
    dwell_s: float = Field(gt=0)


class RouteConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = Field(min_length=1)
    legs: List[LegConfig] = Field(min_length=1)


def load_routes(file_path: str) -> List[Route]:
    """Routes from a JSON list (or a ``routes`` table in TOML) of ``{name, legs: [{station, dwell_s}]}``."""
    data: Any = load_structured_file(file_path)
    if isinstance(data, dict):
        data = data.get("routes", [])
    try:
        routes = TypeAdapter(List[RouteConfig]).validate_python(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid route file {file_path}: {e}") from e
    names = [r.name for r in routes]
    if len(set(names)) != len(names):
        raise ConfigError(f"Duplicate route names in {file_path}")
    return [Route(r.name, tuple(Leg(leg.station, leg.dwell_s) for leg in r.legs)) for r in routes]
