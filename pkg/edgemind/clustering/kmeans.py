"""K-means with minimum and maximum cluster sizes.

The assignment step is the transportation problem of Bradley, Bennett and
Demiriz, solved as a minimum-cost flow: every point ships one unit to a
cluster node, each cluster node must receive at least ``min_size`` units and
at most ``max_size``.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import networkx as nx
import numpy as np
from sklearn.cluster import kmeans_plusplus

from edgemind.errors import ConfigError, InfeasibleError

logger = logging.getLogger(__name__)

# Squared distances are scaled to integers for the network simplex.
COST_SCALE = 10**9


@dataclass(frozen=True)
class ConstrainedKMeansResult:
    labels: np.ndarray
    centers: np.ndarray
    objective: float
    history: Tuple[float, ...]
    n_iter: int
    restart: int


def check_feasible(n_points: int, k: int, min_size: int, max_size: int) -> None:
    if k < 1:
        raise ConfigError(f"k must be at least 1, got {k}")
    if min_size < 0 or max_size < min_size:
        raise InfeasibleError(f"invalid size bounds [{min_size}, {max_size}]")
    if not k * min_size <= n_points <= k * max_size:
        raise InfeasibleError(
            f"{n_points} points cannot fill {k} clusters with sizes in [{min_size}, {max_size}]"
        )


def squared_distances(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    return ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)


def assign_with_bounds(points: np.ndarray, centers: np.ndarray, min_size: int, max_size: int) -> np.ndarray:
    """
    Optimal assignment of points to fixed centers under cluster size bounds.

    Args:
        points: M x d matrix
        centers: k x d matrix
        min_size: Minimum points per cluster
        max_size: Maximum points per cluster

    Returns:
        Length-M label vector minimizing the total squared distance; among
        equal-cost assignments lower cluster ids go to lower station indices
    """
    points = np.asarray(points, dtype=float)
    centers = np.asarray(centers, dtype=float)
    m, k = len(points), len(centers)
    check_feasible(m, k, min_size, max_size)

    cost = squared_distances(points, centers)
    # Tie term j * (m - i): the total over any assignment stays below one unit of scaled cost.
    tie = np.arange(k)[None, :] * (m - np.arange(m))[:, None]
    spread = (k - 1) * m * (m + 1) // 2 + 1
    scale = min(COST_SCALE, 2**62 // (spread * m)) / cost.max() if cost.max() > 0 else 0.0
    weights = np.rint(cost * scale).astype(np.int64) * spread + tie

    graph = nx.DiGraph()
    for i in range(m):
        graph.add_node(("p", i), demand=-1)
    for j in range(k):
        graph.add_node(("c", j), demand=min_size)
    graph.add_node("sink", demand=m - k * min_size)
    for i in range(m):
        for j in range(k):
            graph.add_edge(("p", i), ("c", j), weight=int(weights[i, j]), capacity=1)
    for j in range(k):
        graph.add_edge(("c", j), "sink", weight=0, capacity=max_size - min_size)

    try:
        flow = nx.min_cost_flow(graph)
    except nx.NetworkXUnfeasible as e:
        raise InfeasibleError(f"Error solving the constrained assignment: {e}") from e

    labels = np.empty(m, dtype=int)
    for i in range(m):
        labels[i] = next(j for j in range(k) if flow[("p", i)][("c", j)] == 1)
    return labels


def assignment_cost(points: np.ndarray, centers: np.ndarray, labels: np.ndarray) -> float:
    return float(((points - centers[labels]) ** 2).sum())


def canonical_order(labels: np.ndarray, k: int) -> np.ndarray:
    """New id of every cluster: by lowest member index, empty clusters last."""
    mapping: dict = {}
    for label in labels:
        mapping.setdefault(int(label), len(mapping))
    for j in range(k):
        mapping.setdefault(j, len(mapping))
    return np.array([mapping[j] for j in range(k)], dtype=int)


def _single_run(points: np.ndarray, k: int, min_size: int, max_size: int, seed: np.random.SeedSequence, max_iter: int, restart: int) -> ConstrainedKMeansResult:
    random_state = int(seed.generate_state(1)[0])
    centers, _ = kmeans_plusplus(points, n_clusters=k, random_state=random_state)
    labels: Optional[np.ndarray] = None
    history: List[float] = []
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        new_labels = assign_with_bounds(points, centers, min_size, max_size)
        history.append(assignment_cost(points, centers, new_labels))
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for j in range(k):
            members = points[labels == j]
            if len(members):
                centers[j] = members.mean(axis=0)
        history.append(assignment_cost(points, centers, labels))
        logger.debug("restart %d iteration %d objective %.6g", restart, n_iter, history[-1])
    assert labels is not None
    return ConstrainedKMeansResult(labels, centers, assignment_cost(points, centers, labels), tuple(history), n_iter, restart)


def fit_constrained_kmeans(
    points: np.ndarray,
    k: int,
    min_size: int,
    max_size: int,
    seed: int,
    n_init: int = 20,
    max_iter: int = 100,
) -> ConstrainedKMeansResult:
    """
    Size-constrained K-means with k-means++ seeding and ``n_init`` restarts.

    Each restart alternates the optimal bounded assignment with centroid
    updates until the assignment stops changing or ``max_iter`` is reached;
    the objective never increases along the way. The restart with the
    lowest final objective wins (ties go to the earlier restart), and its
    labels are renumbered by lowest member index.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    check_feasible(len(points), k, min_size, max_size)
    if k > len(points):
        raise ConfigError(f"k={k} exceeds the number of points ({len(points)})")
    if n_init < 1 or max_iter < 1:
        raise ConfigError("n_init and max_iter must be at least 1")

    best: Optional[ConstrainedKMeansResult] = None
    for restart, child in enumerate(np.random.SeedSequence(seed).spawn(n_init)):
        result = _single_run(points, k, min_size, max_size, child, max_iter, restart)
        if best is None or result.objective < best.objective:
            best = result
    assert best is not None
    logger.debug("best restart %d objective %.6g after %d iterations", best.restart, best.objective, best.n_iter)
    order = canonical_order(best.labels, k)
    centers = np.empty_like(best.centers)
    centers[order] = best.centers
    return ConstrainedKMeansResult(order[best.labels], centers, best.objective, best.history, best.n_iter, best.restart)


def constrained_kmeans(
    points: np.ndarray,
    k: int,
    min_size: int,
    max_size: int,
    seed: int,
    n_init: int = 20,
    max_iter: int = 100,
) -> np.ndarray:
    """Labels of :func:`fit_constrained_kmeans`."""
    return fit_constrained_kmeans(points, k, min_size, max_size, seed, n_init, max_iter).labels
