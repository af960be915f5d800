"""Intra/inter-cluster handover ratios under periodic re-clustering."""
import logging
import math
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import stats

from edgemind.clustering import cluster_data_driven, cluster_geographic
from edgemind.errors import ConfigError, InsufficientData, ShapeError
from edgemind.models.clustering import ClusterAssignment, RatioPoint, RatioSummary, Strategy
from edgemind.models.telemetry import EventLog, HandoverCounts
from edgemind.telemetry import count_handovers, iter_windows

logger = logging.getLogger(__name__)

RATIO_COLUMNS = ["window_start", "intra", "inter", "R"]
SUMMARY_COLUMNS = ["n_clusters", "strategy", "mean_R", "ci_lo", "ci_hi"]


def split_handovers(counts: HandoverCounts, assignment: ClusterAssignment) -> Tuple[int, int]:
    """
    Split the handovers of a window into intra- and inter-cluster counts.

    Returns:
        Tuple (intra, inter) with intra + inter equal to the window total
    """
    labels = np.asarray(assignment.labels, dtype=int)
    if len(labels) != counts.n:
        raise ShapeError(f"assignment covers {len(labels)} stations, counts cover {counts.n}")
    same = labels[:, None] == labels[None, :]
    total = int(counts.counts.sum())
    intra = int(counts.counts[same].sum())
    return intra, total - intra


def ratio(intra: int, inter: int) -> Optional[float]:
    return intra / inter if inter > 0 else None


def _score(log: EventLog, window: HandoverCounts, assignment: ClusterAssignment, score_bin_s: Optional[int]) -> List[RatioPoint]:
    if score_bin_s is None or score_bin_s >= window.window_len:
        slots = [window]
    else:
        end = min(window.window_start + window.window_len, log.end_s)
        slots = [
            count_handovers(log, start, min(score_bin_s, end - start))
            for start in range(window.window_start, end, score_bin_s)
        ]
    points = []
    for slot in slots:
        intra, inter = split_handovers(slot, assignment)
        points.append(RatioPoint(slot.window_start, slot.window_len, intra, inter, ratio(intra, inter), assignment))
    return points


def evaluate_periodic(
    log: EventLog,
    strategy: Strategy,
    n_clusters: int,
    period_s: int,
    seed: int,
    score_bin_s: Optional[int] = None,
    n_init: int = 20,
) -> List[RatioPoint]:
    """
    Re-cluster every ``period_s`` seconds and score each window with the
    association learned on the previous one.

    The geographic strategy computes one static association up front and
    scores the same windows, so both strategies cover identical periods.

    Args:
        log: Event trace spanning at least two periods
        strategy: Association strategy
        n_clusters: Number of controllers N_c
        period_s: Re-clustering period T_c in seconds
        seed: Seed for the K-means restarts
        score_bin_s: Optional scoring slot shorter than the period

    Returns:
        One RatioPoint per scored slot, in time order
    """
    strategy = Strategy(strategy)
    if score_bin_s is not None and score_bin_s <= 0:
        raise ConfigError(f"score_bin_s must be positive, got {score_bin_s}")
    windows = list(iter_windows(log, period_s))
    if len(windows) < 2:
        raise InsufficientData(
            f"trace of {log.end_s} s holds {len(windows)} period(s) of {period_s} s; at least 2 are needed"
        )

    static = cluster_geographic(log.stations, n_clusters, seed, n_init=n_init) if strategy is Strategy.GEOGRAPHIC else None
    points: List[RatioPoint] = []
    for previous, current in zip(windows, windows[1:]):
        assignment = static or cluster_data_driven(previous, n_clusters, seed, n_init=n_init)
        points.extend(_score(log, current, assignment, score_bin_s))
    logger.info(
        "Evaluated %s association with N_c=%d over %d periods of %d s",
        strategy.value, n_clusters, len(windows) - 1, period_s,
    )
    return points


def mean_ratio(points: Iterable[RatioPoint]) -> Optional[float]:
    """Mean R over the points where it is defined."""
    values = [p.R for p in points if p.R is not None]
    return float(np.mean(values)) if values else None


def _normal_ci(values: Sequence[float], level: float = 0.95) -> Tuple[Optional[float], Optional[float], Optional[float]]:
    if not values:
        return None, None, None
    mean = float(np.mean(values))
    if len(values) < 2:
        return mean, mean, mean
    half = stats.norm.ppf(0.5 + level / 2) * np.std(values, ddof=1) / math.sqrt(len(values))
    return mean, mean - half, mean + half


def ratio_vs_clusters(
    log: EventLog,
    strategy: Strategy,
    cluster_counts: Sequence[int],
    period_s: int,
    seeds: Sequence[int],
    score_bin_s: Optional[int] = None,
    n_init: int = 20,
    collect: Optional[Dict[Tuple[int, int], List[RatioPoint]]] = None,
) -> List[RatioSummary]:
    """
    Mean R with a 95% normal confidence interval over seeds, per N_c.

    When ``collect`` is given it receives the per-window points of every
    (N_c, seed) run.
    """
    if len(seeds) < 2:
        raise ConfigError("at least two seeds are needed for confidence intervals")
    strategy = Strategy(strategy)
    summaries = []
    for n_clusters in cluster_counts:
        per_seed = []
        for seed in seeds:
            points = evaluate_periodic(log, strategy, n_clusters, period_s, seed, score_bin_s, n_init)
            if collect is not None:
                collect[(n_clusters, seed)] = points
            value = mean_ratio(points)
            if value is not None:
                per_seed.append(value)
        mean, lo, hi = _normal_ci(per_seed)
        summaries.append(RatioSummary(n_clusters, strategy, mean, lo, hi, len(per_seed)))
        logger.info("N_c=%d %s: mean R %s over %d seeds", n_clusters, strategy.value, mean, len(per_seed))
    return summaries


def ratio_gain(data_driven: Sequence[RatioSummary], geographic: Sequence[RatioSummary]) -> pd.DataFrame:
    """
    Percent increase of the data-driven mean R over the geographic one.

    Returns:
        DataFrame with n_clusters, both mean R columns and gain_pct (NaN when
        either mean is missing or the geographic mean is 0)
    """
    geo: Dict[int, Optional[float]] = {s.n_clusters: s.mean_R for s in geographic}
    rows = []
    for summary in data_driven:
        base = geo.get(summary.n_clusters)
        gain = None
        if summary.mean_R is not None and base:
            gain = 100.0 * (summary.mean_R - base) / base
        rows.append(
            {
                "n_clusters": summary.n_clusters,
                "mean_R_data_driven": summary.mean_R,
                "mean_R_geographic": base,
                "gain_pct": gain,
            }
        )
    return pd.DataFrame(rows, columns=["n_clusters", "mean_R_data_driven", "mean_R_geographic", "gain_pct"], dtype=float).astype({"n_clusters": int})


def points_frame(points: Sequence[RatioPoint]) -> pd.DataFrame:
    return pd.DataFrame(
        [(p.window_start, p.intra, p.inter, p.R) for p in points],
        columns=RATIO_COLUMNS,
    )


def summary_frame(summaries: Sequence[RatioSummary]) -> pd.DataFrame:
    return pd.DataFrame(
        [(s.n_clusters, s.strategy.value, s.mean_R, s.ci_lo, s.ci_hi) for s in summaries],
        columns=SUMMARY_COLUMNS,
    )
