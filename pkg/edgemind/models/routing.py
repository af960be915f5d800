"""Types for prediction-driven route ranking."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

from edgemind.errors import ConfigError
from edgemind.models.telemetry import StationId


@dataclass(frozen=True)
class Leg:
    station: StationId
    dwell_s: float


@dataclass(frozen=True)
class Route:
    name: str
    legs: Tuple[Leg, ...]

    def __post_init__(self) -> None:
        if not self.legs:
            raise ConfigError(f"route {self.name!r} has no legs")
        for leg in self.legs:
            if leg.dwell_s <= 0:
                raise ConfigError(f"route {self.name!r}: dwell at station {leg.station} must be positive")

    @property
    def duration_s(self) -> float:
        return sum(leg.dwell_s for leg in self.legs)


@dataclass(frozen=True)
class RouteMetrics:
    """Dwell-weighted mean throughput (Mbit/s) and longest outage run (s)."""

    S_hat: float
    D_o_max: float


@dataclass(frozen=True)
class RankedRoute:
    rank: int
    route: Route
    metrics: RouteMetrics
