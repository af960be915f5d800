"""Read and write the event, station and series CSV formats."""
import datetime as dt
import logging
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np
import pandas as pd

from edgemind.errors import ParseError, SchemaError
from edgemind.models.telemetry import DEFAULT_EPOCH, Event, EventKind, EventLog, Station, StationSeries
from edgemind.utils.file_handler import read_csv_table

logger = logging.getLogger(__name__)

EVENT_COLUMNS = ("t_s", "kind", "src", "dst", "ue")
STATION_COLUMNS = ("id", "lat", "lon", "capacity_mbps")
SERIES_COLUMNS = ("station", "bin", "n_ue", "utilization")


def _integer_column(frame: pd.DataFrame, column: str, allow_empty: bool = False) -> pd.Series:
    raw = frame[column].str.strip()
    values = pd.to_numeric(raw, errors="coerce")
    bad = values.isna() | (values != values.round())
    if allow_empty:
        bad &= raw != ""
    if bad.any():
        row = int(np.flatnonzero(bad.to_numpy())[0])
        raise ParseError(f"invalid {column} value {frame[column].iloc[row]!r}", line=row + 2)
    return values


def _float_column(frame: pd.DataFrame, column: str) -> np.ndarray:
    values = pd.to_numeric(frame[column].str.strip(), errors="coerce")
    if values.isna().any():
        row = int(np.flatnonzero(values.isna().to_numpy())[0])
        raise ParseError(f"invalid {column} value {frame[column].iloc[row]!r}", line=row + 2)
    return values.to_numpy(dtype=float)


def load_stations(file_path: str) -> tuple[Station, ...]:
    """
    Read a station CSV (``id,lat,lon,capacity_mbps``).

    Args:
        file_path: Path to the station file

    Returns:
        Stations sorted by id; ids must be dense 0..N-1
    """
    frame = read_csv_table(file_path, STATION_COLUMNS)
    ids = _integer_column(frame, "id").to_numpy(dtype=np.int64)
    lat = _float_column(frame, "lat")
    lon = _float_column(frame, "lon")
    capacity = _float_column(frame, "capacity_mbps")

    if sorted(ids.tolist()) != list(range(len(ids))):
        raise SchemaError(f"Station ids in {file_path} must be dense 0..{len(ids) - 1}")
    for row in range(len(ids)):
        if not -90 <= lat[row] <= 90 or not -180 <= lon[row] <= 180:
            raise SchemaError(f"line {row + 2}: coordinates out of range ({lat[row]}, {lon[row]})")
        if capacity[row] <= 0:
            raise SchemaError(f"line {row + 2}: capacity_mbps must be positive")

    stations = [Station(int(i), float(a), float(o), float(c)) for i, a, o, c in zip(ids, lat, lon, capacity)]
    return tuple(sorted(stations, key=lambda s: s.id))


def ingest_events(
    file_path: str,
    stations: Optional[Sequence[Station]] = None,
    epoch: dt.datetime = DEFAULT_EPOCH,
    duration_s: Optional[int] = None,
) -> EventLog:
    """
    Read an event CSV (``t_s,kind,src,dst,ue``) into a time-sorted EventLog.

    Args:
        file_path: Path to the event file
        stations: Known station set; without it placeholder stations
            0..max(id) are created
        epoch: Calendar time of t = 0
        duration_s: Nominal trace length, if known

    Returns:
        EventLog sorted by time, stable for equal timestamps

    Raises:
        ParseError: Malformed row (with line number)
        SchemaError: Unknown kind, bad dst, or unknown station id
    """
    frame = read_csv_table(file_path, EVENT_COLUMNS)
    t = _integer_column(frame, "t_s").to_numpy(dtype=np.int64)
    src = _integer_column(frame, "src").to_numpy(dtype=np.int64)
    dst_values = _integer_column(frame, "dst", allow_empty=True)
    kinds = frame["kind"].str.strip()

    valid_kinds = {k.value for k in EventKind}
    unknown = ~kinds.isin(valid_kinds)
    if unknown.any():
        row = int(np.flatnonzero(unknown.to_numpy())[0])
        raise SchemaError(f"line {row + 2}: unknown event kind {kinds.iloc[row]!r}")
    if (t < 0).any():
        row = int(np.flatnonzero(t < 0)[0])
        raise ParseError("t_s must be non-negative", line=row + 2)

    is_handover = kinds.isin([EventKind.HO_X2.value, EventKind.HO_S1.value]).to_numpy()
    has_dst = dst_values.notna().to_numpy()
    for row in np.flatnonzero(is_handover != has_dst):
        if is_handover[row]:
            raise SchemaError(f"line {row + 2}: handover event without dst")
        raise SchemaError(f"line {row + 2}: context event must not have dst")
    dst = np.where(has_dst, dst_values.fillna(-1).to_numpy(dtype=float), -1).astype(np.int64)
    self_loops = is_handover & (dst == src)
    if self_loops.any():
        raise SchemaError(f"line {int(np.flatnonzero(self_loops)[0]) + 2}: handover with dst equal to src")
    ues = frame["ue"].str.strip()
    if (ues == "").any():
        raise SchemaError(f"line {int(np.flatnonzero((ues == '').to_numpy())[0]) + 2}: empty ue identifier")

    negative = (src < 0) | (is_handover & (dst < 0))
    if negative.any():
        row = int(np.flatnonzero(negative)[0])
        bad_id = src[row] if src[row] < 0 else dst[row]
        raise SchemaError(f"line {row + 2}: unknown station id {bad_id}")

    max_id = int(max(src.max(initial=-1), dst.max(initial=-1)))
    if stations is None:
        stations = tuple(Station(i, 0.0, 0.0) for i in range(max_id + 1))
    elif max_id >= len(stations):
        row = int(np.flatnonzero((src >= len(stations)) | (dst >= len(stations)))[0])
        raise SchemaError(f"line {row + 2}: unknown station id {max(src[row], dst[row])}")

    events = [
        Event(int(ti), EventKind(k), int(s), int(d) if h else None, u)
        for ti, k, s, d, h, u in zip(t, kinds, src, dst, is_handover, ues)
    ]
    events.sort(key=lambda e: e.t)
    logger.info(
        "Ingested %d events (%d handovers) over %d stations from %s",
        len(events), int(is_handover.sum()), len(stations), file_path,
    )
    return EventLog(tuple(events), tuple(stations), epoch=epoch, duration_s=duration_s)


def write_events(log: EventLog, file_path: str) -> str:
    log.to_frame().to_csv(file_path, index=False, lineterminator="\n")
    return file_path


def write_stations(stations: Iterable[Station], file_path: str) -> str:
    frame = pd.DataFrame(
        [(s.id, s.lat, s.lon, s.capacity_mbps) for s in stations], columns=list(STATION_COLUMNS)
    )
    frame.to_csv(file_path, index=False, float_format="%.7f", lineterminator="\n")
    return file_path


def write_series(series: Mapping[int, StationSeries], file_path: str) -> str:
    frames = [s.to_frame() for _, s in sorted(series.items())]
    frame = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=list(SERIES_COLUMNS))
    frame.to_csv(file_path, index=False, float_format="%.6f", lineterminator="\n")
    return file_path
