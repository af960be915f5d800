"""Configuration models for the synthetic mobility generator."""
from __future__ import annotations

import datetime as dt
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from edgemind.models.telemetry import DEFAULT_EPOCH

FLAT_PROFILE: List[float] = [1.0] * 24


class BoundingBox(BaseModel):
    model_config = ConfigDict(frozen=True)

    lat_min: float = Field(37.74, ge=-90, le=90)
    lat_max: float = Field(37.80, ge=-90, le=90)
    lon_min: float = Field(-122.45, ge=-180, le=180)
    lon_max: float = Field(-122.39, ge=-180, le=180)

    @model_validator(mode="after")
    def _ordered(self) -> "BoundingBox":
        if self.lat_min >= self.lat_max or self.lon_min >= self.lon_max:
            raise ValueError("bounding box minimums must be below maximums")
        return self


class Corridor(BaseModel):
    """A mobility corridor walked station to station, e.g. a rail line.

    ``platoon_mean`` is the mean number of UEs travelling together per
    arrival; ``hourly_profile`` overrides the global daily profile.
    """

    model_config = ConfigDict(frozen=True)

    path: List[int] = Field(min_length=2)
    flow_per_hour: float = Field(ge=0)
    direction_bias: float = Field(1.0, ge=0, le=1)
    dwell_mean_s: float = Field(120.0, gt=0)
    platoon_mean: float = Field(1.0, ge=1)
    hourly_profile: Optional[List[float]] = None

    @field_validator("path")
    @classmethod
    def _adjacent_distinct(cls, path: List[int]) -> List[int]:
        if any(s < 0 for s in path):
            raise ValueError("corridor stations must be non-negative")
        if any(a == b for a, b in zip(path, path[1:])):
            raise ValueError("adjacent corridor stations must differ")
        return path

    @field_validator("hourly_profile")
    @classmethod
    def _profile_shape(cls, profile: Optional[List[float]]) -> Optional[List[float]]:
        if profile is not None and (len(profile) != 24 or min(profile) < 0):
            raise ValueError("hourly_profile needs 24 non-negative values")
        return profile


class SimConfig(BaseModel):
    """Everything the generator needs; identical configs give identical traces."""

    model_config = ConfigDict(frozen=True)

    n_stations: int = Field(ge=2)
    n_ues: int = Field(0, ge=0)
    days: int = Field(1, ge=1)
    seed: int = Field(0, ge=0, lt=2**64)
    layout: Literal["grid", "uniform-random"] = "grid"
    corridors: List[Corridor] = Field(default_factory=list)
    daily_profile: List[float] = Field(default_factory=lambda: list(FLAT_PROFILE))
    weekday_multiplier: float = Field(1.0, ge=0)
    weekend_multiplier: float = Field(0.6, ge=0)
    handover_rate_per_ue: float = Field(2.0, ge=0)
    session_mean_s: float = Field(600.0, gt=0)
    sessions_per_ue_per_hour: float = Field(0.5, ge=0)
    x2_fraction: float = Field(0.8, ge=0, le=1)
    neighbors: int = Field(4, ge=1)
    capacity_mbps: float = Field(150.0, gt=0)
    bbox: BoundingBox = Field(default_factory=BoundingBox)
    start: dt.datetime = DEFAULT_EPOCH

    @field_validator("daily_profile")
    @classmethod
    def _daily_profile(cls, profile: List[float]) -> List[float]:
        if len(profile) != 24 or min(profile) < 0:
            raise ValueError("daily_profile needs 24 non-negative values")
        return profile

    @model_validator(mode="after")
    def _corridors_in_range(self) -> "SimConfig":
        for corridor in self.corridors:
            if max(corridor.path) >= self.n_stations:
                raise ValueError(
                    f"corridor path {corridor.path} references a station >= n_stations={self.n_stations}"
                )
        return self

    @property
    def duration_s(self) -> int:
        return self.days * 86400
