"""Canonical data model for network events and binned time series."""
from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np
import pandas as pd

StationId = int

DEFAULT_EPOCH = dt.datetime(2017, 1, 31)


class EventKind(str, Enum):
    HO_X2 = "HO_X2"
    HO_S1 = "HO_S1"
    CTX_SETUP = "CTX_SETUP"
    CTX_RELEASE = "CTX_RELEASE"

    @property
    def is_handover(self) -> bool:
        return self in (EventKind.HO_X2, EventKind.HO_S1)


@dataclass(frozen=True)
class Station:
    id: StationId
    lat: float
    lon: float
    capacity_mbps: float = 100.0


@dataclass(frozen=True)
class Event:
    t: int
    kind: EventKind
    src: StationId
    dst: Optional[StationId]
    ue: str


@dataclass(frozen=True)
class EventLog:
    """Timestamped events of one trace, sorted by time.

    ``duration_s`` is the nominal trace length when known (simulated traces);
    otherwise the trace ends one second after its last event.
    """

    events: Tuple[Event, ...]
    stations: Tuple[Station, ...]
    epoch: dt.datetime = DEFAULT_EPOCH
    duration_s: Optional[int] = None

    @property
    def n_stations(self) -> int:
        return len(self.stations)

    @property
    def end_s(self) -> int:
        if self.duration_s is not None:
            return self.duration_s
        return self.events[-1].t + 1 if self.events else 0

    def handovers(self) -> list[Event]:
        return [e for e in self.events if e.kind.is_handover]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "t_s": [e.t for e in self.events],
                "kind": [e.kind.value for e in self.events],
                "src": [e.src for e in self.events],
                "dst": pd.array([e.dst for e in self.events], dtype="Int64"),
                "ue": [e.ue for e in self.events],
            }
        )


@dataclass(frozen=True)
class Session:
    """One UE context at one station, active over ``[start, end)``."""

    ue: str
    station: StationId
    start: int
    end: int


@dataclass(frozen=True)
class SessionPairing:
    sessions: Tuple[Session, ...]
    unmatched_releases: int = 0
    duplicate_setups: int = 0
    open_at_end: int = 0


@dataclass(frozen=True)
class StationSeries:
    """Binned active-UE counts for one station.

    ``bins`` are strictly increasing bin indices, bin ``k`` covering
    ``[k * bin_s, (k + 1) * bin_s)`` seconds after the trace epoch.
    """

    station: StationId
    bin_s: int
    bins: np.ndarray
    n_ue: np.ndarray
    utilization: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.utilization is None:
            object.__setattr__(self, "utilization", np.zeros(len(self.bins)))

    def __len__(self) -> int:
        return len(self.bins)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "station": self.station,
                "bin": self.bins,
                "n_ue": self.n_ue,
                "utilization": self.utilization,
            }
        )


@dataclass(frozen=True)
class HandoverCounts:
    """Handover counts N_ho(i, j) from station i to station j in one window."""

    window_start: int
    window_len: int
    counts: np.ndarray

    @property
    def n(self) -> int:
        return self.counts.shape[0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())
