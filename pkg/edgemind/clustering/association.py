"""Data-driven and geographic controller association."""
import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from edgemind.clustering.graph import build_transition_graph, spectral_embed
from edgemind.clustering.kmeans import constrained_kmeans
from edgemind.errors import ConfigError
from edgemind.models.clustering import ClusterAssignment, Strategy
from edgemind.models.telemetry import HandoverCounts, Station
from edgemind.utils.calendar_utils import calculate_size_bounds

logger = logging.getLogger(__name__)


def size_bounds(n_stations: int, n_clusters: int) -> Tuple[int, int]:
    """Cluster size bounds floor(0.8 N_g / N_c) and ceil(1.2 N_g / N_c)."""
    if not 1 <= n_clusters <= n_stations:
        raise ConfigError(f"n_clusters must be in [1, {n_stations}], got {n_clusters}")
    return calculate_size_bounds(n_stations, n_clusters)


def _bounds(n_stations: int, n_clusters: int, min_size: Optional[int], max_size: Optional[int]) -> Tuple[int, int]:
    low, high = size_bounds(n_stations, n_clusters)
    return (low if min_size is None else min_size), (high if max_size is None else max_size)


def cluster_data_driven(
    counts: HandoverCounts,
    n_clusters: int,
    seed: int,
    min_size: Optional[int] = None,
    max_size: Optional[int] = None,
    n_init: int = 20,
    max_iter: int = 100,
) -> ClusterAssignment:
    """
    Spectral clustering of the handover graph with size-constrained K-means.

    Args:
        counts: Handover counts of the window the association is learned from
        n_clusters: Number of controllers N_c
        seed: Seed for the K-means restarts
        min_size: Override for the lower size bound
        max_size: Override for the upper size bound

    Returns:
        ClusterAssignment tagged with the source window
    """
    n_stations = counts.n
    low, high = _bounds(n_stations, n_clusters, min_size, max_size)
    graph = build_transition_graph(counts)
    embedding = spectral_embed(graph.L, graph.D, n_clusters)
    labels = constrained_kmeans(embedding.U, n_clusters, low, high, seed, n_init=n_init, max_iter=max_iter)
    logger.debug(
        "Data-driven association for window %d+%d: sizes %s",
        counts.window_start, counts.window_len, np.bincount(labels, minlength=n_clusters).tolist(),
    )
    return ClusterAssignment(
        labels=tuple(int(label) for label in labels),
        n_clusters=n_clusters,
        min_size=low,
        max_size=high,
        strategy=Strategy.DATA_DRIVEN,
        source_window=(counts.window_start, counts.window_len),
    )


def cluster_geographic(
    stations: Sequence[Station],
    n_clusters: int,
    seed: int,
    min_size: Optional[int] = None,
    max_size: Optional[int] = None,
    n_init: int = 20,
    max_iter: int = 100,
) -> ClusterAssignment:
    """Size-constrained K-means on raw (lat, lon) coordinates."""
    low, high = _bounds(len(stations), n_clusters, min_size, max_size)
    points = np.array([[s.lat, s.lon] for s in stations], dtype=float)
    labels = constrained_kmeans(points, n_clusters, low, high, seed, n_init=n_init, max_iter=max_iter)
    return ClusterAssignment(
        labels=tuple(int(label) for label in labels),
        n_clusters=n_clusters,
        min_size=low,
        max_size=high,
        strategy=Strategy.GEOGRAPHIC,
        source_window="static",
    )
