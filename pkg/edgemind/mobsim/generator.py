"""Seeded generator of synthetic EventLogs.

Sessions, background handovers and corridor trips each draw from their own
child stream of one ``SeedSequence``, so a config always yields the same
trace.
"""
import datetime as dt
import hashlib
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np
from pydantic import ValidationError

from edgemind.errors import ConfigError
from edgemind.models.simulation import Corridor, SimConfig
from edgemind.models.telemetry import Event, EventKind, EventLog, Station
from edgemind.utils.geo import haversine_distance

logger = logging.getLogger(__name__)

_TOPOLOGY, _SESSIONS, _BACKGROUND, _CORRIDORS = range(4)


def validate_config(data: Dict[str, Any]) -> SimConfig:
    """Build a SimConfig from raw values, raising ConfigError on invalid input."""
    try:
        return SimConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid simulation config: {e}") from e


def _streams(cfg: SimConfig) -> List[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(cfg.seed).spawn(4)]


def _hash_ue(label: str) -> str:
    return hashlib.blake2b(label.encode("utf-8"), digest_size=6).hexdigest()


def generate_topology(cfg: SimConfig) -> Tuple[Station, ...]:
    """
    Place ``cfg.n_stations`` stations inside the configured bounding box.

    Args:
        cfg: Simulation config; ``layout`` is ``grid`` or ``uniform-random``

    Returns:
        Stations with ids 0..n-1, coordinates rounded to 1e-7 degrees
    """
    box = cfg.bbox
    n = cfg.n_stations
    if cfg.layout == "grid":
        cols = math.ceil(math.sqrt(n))
        rows = math.ceil(n / cols)
        r, c = np.divmod(np.arange(n), cols)
        lat = box.lat_max - (r + 0.5) / rows * (box.lat_max - box.lat_min)
        lon = box.lon_min + (c + 0.5) / cols * (box.lon_max - box.lon_min)
    else:
        rng = _streams(cfg)[_TOPOLOGY]
        lat = rng.uniform(box.lat_min, box.lat_max, size=n)
        lon = rng.uniform(box.lon_min, box.lon_max, size=n)
    return tuple(
        Station(i, round(float(a), 7), round(float(o), 7), cfg.capacity_mbps) for i, (a, o) in enumerate(zip(lat, lon))
    )


def _neighbor_table(topo: Sequence[Station], k: int) -> Tuple[np.ndarray, np.ndarray]:
    """Indices of the k nearest stations and inverse-distance selection probabilities."""
    lat = np.array([s.lat for s in topo])
    lon = np.array([s.lon for s in topo])
    dist = haversine_distance(lat[:, None], lon[:, None], lat[None, :], lon[None, :])
    np.fill_diagonal(dist, np.inf)
    k = min(k, len(topo) - 1)
    nearest = np.argsort(dist, axis=1, kind="stable")[:, :k]
    weights = 1.0 / np.maximum(np.take_along_axis(dist, nearest, axis=1), 1.0)
    return nearest, weights / weights.sum(axis=1, keepdims=True)


@dataclass
class _EventBuffer:
    horizon: int
    rows: List[Tuple[int, int, EventKind, int, Any, str]] = field(default_factory=list)

    def add(self, t: int, kind: EventKind, src: int, dst: Any, ue: str) -> None:
        if t < self.horizon:
            self.rows.append((t, len(self.rows), kind, src, dst, ue))

    def handover(self, t: int, src: int, dst: int, ue: str, x2: bool) -> None:
        """A handover moves the UE context from ``src`` to ``dst``."""
        self.add(t, EventKind.HO_X2 if x2 else EventKind.HO_S1, src, dst, ue)
        self.add(t, EventKind.CTX_RELEASE, src, None, ue)
        self.add(t, EventKind.CTX_SETUP, dst, None, ue)

    def events(self) -> Tuple[Event, ...]:
        self.rows.sort(key=lambda row: (row[0], row[1]))
        return tuple(Event(t, kind, src, dst, ue) for t, _, kind, src, dst, ue in self.rows)


def _day_multiplier(cfg: SimConfig, day: int) -> float:
    weekday = (cfg.start + dt.timedelta(days=day)).weekday() < 5
    return cfg.weekday_multiplier if weekday else cfg.weekend_multiplier


def _background_sessions(cfg: SimConfig, topo: Sequence[Station], buffer: _EventBuffer, streams: List[np.random.Generator]) -> int:
    if cfg.n_ues == 0 or cfg.sessions_per_ue_per_hour == 0:
        return 0
    rng = streams[_SESSIONS]
    moves = streams[_BACKGROUND]
    nearest, probs = _neighbor_table(topo, cfg.neighbors)
    homes = rng.integers(cfg.n_stations, size=cfg.n_ues)
    busy_until = np.zeros(cfg.n_ues, dtype=np.int64)
    ue_names = [_hash_ue(f"bg:{cfg.seed}:{u}") for u in range(cfg.n_ues)]

    n_sessions = 0
    for day in range(cfg.days):
        mult = _day_multiplier(cfg, day)
        for hour in range(24):
            hour_start = (day * 24 + hour) * 3600
            lam = cfg.n_ues * cfg.sessions_per_ue_per_hour * cfg.daily_profile[hour] * mult
            count = rng.poisson(lam)
            starts = np.sort(hour_start + rng.integers(0, 3600, size=count))
            ues = rng.integers(cfg.n_ues, size=count)
            durations = np.maximum(1, np.rint(rng.exponential(cfg.session_mean_s, size=count))).astype(np.int64)
            for start, ue, duration in zip(starts, ues, durations):
                if busy_until[ue] > start:
                    continue
                end = int(start + duration)
                busy_until[ue] = end
                n_sessions += 1
                name = ue_names[ue]
                station = int(homes[ue])
                buffer.add(int(start), EventKind.CTX_SETUP, station, None, name)
                n_moves = moves.poisson(cfg.handover_rate_per_ue * duration / 3600.0)
                for t in np.sort(moves.integers(int(start) + 1, end + 1, size=n_moves)):
                    target = int(nearest[station, moves.choice(nearest.shape[1], p=probs[station])])
                    buffer.handover(int(t), station, target, name, moves.random() < cfg.x2_fraction)
                    station = target
                buffer.add(end, EventKind.CTX_RELEASE, station, None, name)
    return n_sessions


def _corridor_trips(cfg: SimConfig, buffer: _EventBuffer, streams: List[np.random.Generator]) -> int:
    rng = streams[_CORRIDORS]
    n_trips = 0
    for index, corridor in enumerate(cfg.corridors):
        profile = corridor.hourly_profile or cfg.daily_profile
        for day in range(cfg.days):
            mult = _day_multiplier(cfg, day)
            for hour in range(24):
                hour_start = (day * 24 + hour) * 3600
                lam = corridor.flow_per_hour * profile[hour] * mult / corridor.platoon_mean
                for start in np.sort(hour_start + rng.integers(0, 3600, size=rng.poisson(lam))):
                    size = 1 + rng.poisson(corridor.platoon_mean - 1)
                    forward = rng.random() < corridor.direction_bias
                    dwell = np.maximum(1, np.rint(corridor.dwell_mean_s * rng.uniform(0.8, 1.2, size=len(corridor.path))))
                    _emit_trip(cfg, corridor, index, n_trips, int(start), size, forward, dwell, buffer, rng)
                    n_trips += 1
    return n_trips


def _emit_trip(
    cfg: SimConfig,
    corridor: Corridor,
    index: int,
    trip: int,
    start: int,
    size: int,
    forward: bool,
    dwell: np.ndarray,
    buffer: _EventBuffer,
    rng: np.random.Generator,
) -> None:
    path = corridor.path if forward else corridor.path[::-1]
    for member in range(size):
        name = _hash_ue(f"corridor:{cfg.seed}:{index}:{trip}:{member}")
        t = start + int(rng.integers(0, 30))
        buffer.add(t, EventKind.CTX_SETUP, path[0], None, name)
        for src, dst, stay in zip(path, path[1:], dwell):
            t += int(stay)
            buffer.handover(t, src, dst, name, rng.random() < cfg.x2_fraction)
        buffer.add(t + int(dwell[-1]), EventKind.CTX_RELEASE, path[-1], None, name)


def simulate(cfg: SimConfig, topo: Sequence[Station]) -> EventLog:
    """
    Generate a synthetic trace.

    Background UEs open sessions at their home station with an hourly rate
    following ``daily_profile`` times the weekday or weekend multiplier, and
    hand over to one of the nearest stations weighted by inverse distance.
    Corridor platoons walk their path station to station.

    Args:
        cfg: Simulation config
        topo: Stations from ``generate_topology`` for the same config

    Returns:
        EventLog spanning ``cfg.days`` days from ``cfg.start``
    """
    if len(topo) != cfg.n_stations:
        raise ConfigError(f"Topology has {len(topo)} stations, config expects {cfg.n_stations}")

    streams = _streams(cfg)
    buffer = _EventBuffer(horizon=cfg.duration_s)
    n_sessions = _background_sessions(cfg, topo, buffer, streams)
    n_trips = _corridor_trips(cfg, buffer, streams)
    events = buffer.events()
    logger.info(
        "Simulated %d events (%d background sessions, %d corridor trips) over %d days",
        len(events), n_sessions, n_trips, cfg.days,
    )
    return EventLog(events, tuple(topo), epoch=cfg.start, duration_s=cfg.duration_s)


def corridor_membership(cfg: SimConfig) -> np.ndarray:
    """Index of the first corridor visiting each station, -1 for background-only stations."""
    membership = np.full(cfg.n_stations, -1, dtype=int)
    for index, corridor in enumerate(cfg.corridors):
        for station in corridor.path:
            if membership[station] < 0:
                membership[station] = index
    return membership
