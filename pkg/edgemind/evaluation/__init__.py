from edgemind.evaluation.delay import cluster_delay_frame, cluster_delays, delay_frame, propagation_delay
from edgemind.evaluation.ratio import (
    evaluate_periodic,
    mean_ratio,
    points_frame,
    ratio_gain,
    ratio_vs_clusters,
    split_handovers,
    summary_frame,
)

__all__ = [
    "cluster_delay_frame",
    "cluster_delays",
    "delay_frame",
    "evaluate_periodic",
    "mean_ratio",
    "points_frame",
    "propagation_delay",
    "ratio_gain",
    "ratio_vs_clusters",
    "split_handovers",
    "summary_frame",
]
