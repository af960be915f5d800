"""Bin UE contexts into active-user series and count handovers per window."""
import logging
import math
from itertools import groupby
from typing import Dict, Iterator, List, Tuple

import numpy as np
import pandas as pd

from edgemind.errors import ConfigError
from edgemind.models.telemetry import EventKind, EventLog, HandoverCounts, Session, SessionPairing, StationSeries

logger = logging.getLogger(__name__)


def _group_order(kinds: List[EventKind], is_open: bool) -> List[EventKind]:
    """Simultaneous events of one context: close an open context first, else open then close."""
    releases = [k for k in kinds if k is EventKind.CTX_RELEASE]
    setups = [k for k in kinds if k is EventKind.CTX_SETUP]
    return releases + setups if is_open else setups + releases


def pair_sessions(log: EventLog) -> SessionPairing:
    """
    Pair CTX_SETUP and CTX_RELEASE events per (ue, station).

    Unmatched releases are dropped, a setup for a context that is already
    open is ignored, and contexts still open at the end of the trace are
    closed at ``log.end_s``. A setup and release of the same context in the
    same second form a zero-length session.
    """
    context = sorted(
        (e for e in log.events if not e.kind.is_handover), key=lambda e: (e.t, e.ue, e.src)
    )

    open_contexts: Dict[Tuple[str, int], int] = {}
    sessions = []
    unmatched = duplicates = 0
    for (t, ue, station), group in groupby(context, key=lambda e: (e.t, e.ue, e.src)):
        key = (ue, station)
        for kind in _group_order([e.kind for e in group], key in open_contexts):
            if kind is EventKind.CTX_SETUP:
                if key in open_contexts:
                    duplicates += 1
                else:
                    open_contexts[key] = t
            elif key in open_contexts:
                sessions.append(Session(ue, station, open_contexts.pop(key), t))
            else:
                unmatched += 1

    end = log.end_s
    for (ue, station), start in open_contexts.items():
        sessions.append(Session(ue, station, start, max(start, end)))

    if unmatched or duplicates:
        logger.warning("Dropped %d unmatched releases and %d duplicate setups", unmatched, duplicates)
    return SessionPairing(tuple(sessions), unmatched, duplicates, len(open_contexts))


def _expand_bins(first: np.ndarray, last: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Row index and bin index for every (interval, bin) pair the intervals touch."""
    lengths = last - first + 1
    rows = np.repeat(np.arange(len(first)), lengths)
    offsets = np.arange(lengths.sum()) - np.repeat(np.cumsum(lengths) - lengths, lengths)
    return rows, first[rows] + offsets


def _busy_seconds(station: np.ndarray, start: np.ndarray, stop: np.ndarray, n_stations: int, n_bins: int, bin_s: int) -> np.ndarray:
    """Seconds per (station, bin) covered by at least one context."""
    busy = np.zeros(n_stations * n_bins, dtype=np.int64)
    if len(station) == 0:
        return busy.reshape(n_stations, n_bins)

    frame = pd.DataFrame({"station": station, "start": start, "stop": stop}).sort_values(
        ["station", "start"], kind="stable"
    )
    reach = frame.groupby("station")["stop"].cummax()
    previous = reach.groupby(frame["station"]).shift(1)
    new_block = previous.isna() | (frame["start"] > previous)
    block = new_block.cumsum()
    merged = frame.groupby(block).agg(station=("station", "first"), start=("start", "min"), stop=("stop", "max"))

    a = merged["start"].to_numpy()
    e = merged["stop"].to_numpy()
    rows, bins = _expand_bins(a // bin_s, np.minimum((e - 1) // bin_s, n_bins - 1))
    overlap = np.minimum(e[rows], (bins + 1) * bin_s) - np.maximum(a[rows], bins * bin_s)
    np.add.at(busy, merged["station"].to_numpy()[rows] * n_bins + bins, overlap)
    return busy.reshape(n_stations, n_bins)


def bin_user_counts(log: EventLog, bin_s: int) -> Dict[int, StationSeries]:
    """
    Count distinct active UEs per station and bin.

    A UE is active in a bin when one of its context intervals at the station
    intersects the bin; ``utilization`` is the busy fraction of the bin.

    Args:
        log: Event trace
        bin_s: Bin width in seconds

    Returns:
        One series per station, all covering bins 0..ceil(end/bin_s)-1
    """
    if bin_s <= 0:
        raise ConfigError(f"bin_s must be positive, got {bin_s}")

    n_stations = log.n_stations
    n_bins = math.ceil(log.end_s / bin_s)
    pairing = pair_sessions(log)
    sessions = pairing.sessions

    counts = np.zeros(n_stations * n_bins, dtype=np.int64)
    busy = np.zeros((n_stations, n_bins), dtype=np.int64)
    if sessions and n_bins:
        station = np.fromiter((s.station for s in sessions), dtype=np.int64, count=len(sessions))
        start = np.fromiter((s.start for s in sessions), dtype=np.int64, count=len(sessions))
        end = np.fromiter((s.end for s in sessions), dtype=np.int64, count=len(sessions))
        ue_codes, ue_names = pd.factorize(pd.Series([s.ue for s in sessions]))
        inside = start < n_bins * bin_s
        station, start, end, ue_codes = station[inside], start[inside], end[inside], ue_codes[inside]

        # Active over [start, end); zero-length contexts occupy their start second.
        stop = np.minimum(np.maximum(end, start + 1), n_bins * bin_s)
        rows, bins = _expand_bins(start // bin_s, (stop - 1) // bin_s)
        cells = station[rows] * n_bins + bins
        keys = np.unique(cells * len(ue_names) + ue_codes[rows])
        counts = np.bincount(keys // len(ue_names), minlength=n_stations * n_bins)
        busy = _busy_seconds(station, start, stop, n_stations, n_bins, bin_s)

    counts = counts.reshape(n_stations, n_bins)
    span = np.full(n_bins, float(bin_s))
    if n_bins:
        span[-1] = log.end_s - (n_bins - 1) * bin_s
    bins_axis = np.arange(n_bins, dtype=np.int64)
    logger.info("Binned %d sessions into %d bins of %d s for %d stations", len(sessions), n_bins, bin_s, n_stations)
    return {
        station: StationSeries(
            station=station,
            bin_s=bin_s,
            bins=bins_axis,
            n_ue=counts[station],
            utilization=np.clip(busy[station] / span, 0.0, 1.0) if n_bins else np.zeros(0),
        )
        for station in range(n_stations)
    }


def _handover_arrays(log: EventLog) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    handovers = log.handovers()
    t = np.fromiter((e.t for e in handovers), dtype=np.int64, count=len(handovers))
    src = np.fromiter((e.src for e in handovers), dtype=np.int64, count=len(handovers))
    dst = np.fromiter((e.dst for e in handovers), dtype=np.int64, count=len(handovers))
    return t, src, dst


def _count_matrix(n: int, src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    counts = np.zeros((n, n), dtype=np.int64)
    np.add.at(counts, (src, dst), 1)
    return counts


def count_handovers(log: EventLog, window_start: int, window_len: int) -> HandoverCounts:
    """
    Count X2 and S1 handovers with ``t`` in ``[window_start, window_start + window_len)``.
    """
    if window_len <= 0:
        raise ConfigError(f"window_len must be positive, got {window_len}")
    t, src, dst = _handover_arrays(log)
    mask = (t >= window_start) & (t < window_start + window_len)
    return HandoverCounts(window_start, window_len, _count_matrix(log.n_stations, src[mask], dst[mask]))


def iter_windows(log: EventLog, window_len: int, start: int = 0) -> Iterator[HandoverCounts]:
    """Consecutive handover windows covering ``[start, log.end_s)``."""
    if window_len <= 0:
        raise ConfigError(f"window_len must be positive, got {window_len}")
    t, src, dst = _handover_arrays(log)
    for window_start in range(start, log.end_s, window_len):
        lo, hi = np.searchsorted(t, [window_start, window_start + window_len], side="left")
        yield HandoverCounts(window_start, window_len, _count_matrix(log.n_stations, src[lo:hi], dst[lo:hi]))
