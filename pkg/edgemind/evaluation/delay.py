"""Fiber propagation delay from stations to candidate controller sites."""
import logging
from typing import List, Sequence, Tuple

import numpy as np
import pandas as pd

from edgemind.errors import ConfigError, ShapeError
from edgemind.models.clustering import ClusterAssignment, DelayReport
from edgemind.models.telemetry import Station
from edgemind.utils.geo import fiber_delay_us, haversine_distance

logger = logging.getLogger(__name__)


def _coordinates(stations: Sequence[Station]) -> Tuple[np.ndarray, np.ndarray]:
    return np.array([s.lat for s in stations], dtype=float), np.array([s.lon for s in stations], dtype=float)


def propagation_delay(stations: Sequence[Station], datacenter: Tuple[float, float]) -> DelayReport:
    """
    One-way fiber delay from every station to a datacenter.

    Args:
        stations: Stations in id order
        datacenter: (lat, lon) in decimal degrees

    Returns:
        DelayReport with per-station delays in microseconds
    """
    lat, lon = datacenter
    if not (-90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0):
        raise ConfigError(f"invalid datacenter coordinates ({lat}, {lon})")
    lats, lons = _coordinates(stations)
    delays = fiber_delay_us(haversine_distance(lats, lons, lat, lon))
    return DelayReport(
        delays_us=delays,
        mean_us=float(delays.mean()) if len(delays) else 0.0,
        max_us=float(delays.max()) if len(delays) else 0.0,
    )


def cluster_delays(stations: Sequence[Station], assignment: ClusterAssignment) -> List[Tuple[int, int, DelayReport]]:
    """
    Per-cluster delays with the controller at the member site that minimizes
    the maximum delay to the other members (ties go to the lowest station id).

    Returns:
        List of (cluster, controller station, DelayReport over members)
    """
    if len(assignment.labels) != len(stations):
        raise ShapeError(f"assignment covers {len(assignment.labels)} stations, got {len(stations)}")
    lats, lons = _coordinates(stations)
    reports = []
    for cluster in range(assignment.n_clusters):
        members = assignment.members(cluster)
        if not members:
            continue
        distances = haversine_distance(lats[members][:, None], lons[members][:, None], lats[members][None, :], lons[members][None, :])
        site = members[int(np.argmin(distances.max(axis=1)))]
        report = propagation_delay([stations[i] for i in members], (stations[site].lat, stations[site].lon))
        reports.append((cluster, site, report))
        logger.debug("cluster %d controller at station %d, max delay %.2f us", cluster, site, report.max_us)
    return reports


def delay_frame(stations: Sequence[Station], report: DelayReport) -> pd.DataFrame:
    return pd.DataFrame({"station": [s.id for s in stations], "delay_us": report.delays_us})


def cluster_delay_frame(reports: Sequence[Tuple[int, int, DelayReport]]) -> pd.DataFrame:
    return pd.DataFrame(
        [(cluster, site, r.mean_us, r.max_us) for cluster, site, r in reports],
        columns=["cluster", "controller_station", "mean_delay_us", "max_delay_us"],
    )
