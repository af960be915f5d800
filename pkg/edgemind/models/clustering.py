"""Types for the controller association pipeline and its evaluation."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Tuple, Union

import numpy as np


class Strategy(str, Enum):
    DATA_DRIVEN = "data-driven"
    GEOGRAPHIC = "geographic"


SourceWindow = Union[Tuple[int, int], str]


@dataclass(frozen=True)
class TransitionGraph:
    """Transition probabilities H, weights W, degrees D and Laplacian L."""

    H: np.ndarray
    W: np.ndarray
    D: np.ndarray
    L: np.ndarray

    @property
    def n(self) -> int:
        return self.H.shape[0]


@dataclass(frozen=True)
class SpectralEmbedding:
    U: np.ndarray
    eigenvalues: np.ndarray


@dataclass(frozen=True)
class ClusterAssignment:
    """Station to controller map. ``source_window`` is ``(start, len)`` or ``"static"``."""

    labels: Tuple[int, ...]
    n_clusters: int
    min_size: int
    max_size: int
    strategy: Strategy
    source_window: SourceWindow = "static"

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(np.asarray(self.labels, dtype=int), minlength=self.n_clusters)

    def members(self, cluster: int) -> list[int]:
        return [i for i, label in enumerate(self.labels) if label == cluster]

    def to_dict(self) -> Dict[str, object]:
        return {
            "strategy": self.strategy.value,
            "n_clusters": self.n_clusters,
            "min_size": self.min_size,
            "max_size": self.max_size,
            "source_window": list(self.source_window)
            if isinstance(self.source_window, tuple)
            else self.source_window,
            "labels": [int(label) for label in self.labels],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, object]) -> "ClusterAssignment":
        window = data.get("source_window", "static")
        return cls(
            labels=tuple(int(label) for label in data["labels"]),  # type: ignore[union-attr]
            n_clusters=int(data["n_clusters"]),  # type: ignore[arg-type]
            min_size=int(data["min_size"]),  # type: ignore[arg-type]
            max_size=int(data["max_size"]),  # type: ignore[arg-type]
            strategy=Strategy(data["strategy"]),
            source_window=tuple(window) if isinstance(window, list) else window,  # type: ignore[arg-type]
        )


@dataclass(frozen=True)
class RatioPoint:
    """Intra/inter-cluster handovers in one scoring window. ``R`` is None when inter is 0."""

    window_start: int
    window_len: int
    intra: int
    inter: int
    R: Optional[float]
    assignment: ClusterAssignment


@dataclass(frozen=True)
class RatioSummary:
    n_clusters: int
    strategy: Strategy
    mean_R: Optional[float]
    ci_lo: Optional[float]
    ci_hi: Optional[float]
    runs: int


@dataclass(frozen=True)
class DelayReport:
    """One-way fiber propagation delay from each station, in microseconds."""

    delays_us: np.ndarray
    mean_us: float
    max_us: float
