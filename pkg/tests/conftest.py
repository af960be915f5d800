import datetime as dt
import os

import numpy as np
import pytest

from edgemind.models.telemetry import DEFAULT_EPOCH, Event, EventKind, EventLog, Station, StationSeries


def make_stations(n, lat0=37.75, lon0=-122.43, step=0.01, capacity=100.0):
    """Stations on a west-east line, ``step`` degrees apart."""
    return tuple(Station(i, lat0, lon0 + i * step, capacity) for i in range(n))


def make_log(rows, n_stations, duration_s=None, epoch=DEFAULT_EPOCH):
    """EventLog from ``(t, kind, src, dst, ue)`` tuples; kind may be a string."""
    events = sorted((Event(t, EventKind(kind), src, dst, ue) for t, kind, src, dst, ue in rows), key=lambda e: e.t)
    return EventLog(tuple(events), make_stations(n_stations), epoch=epoch, duration_s=duration_s)


def handover_log(pairs, n_stations, duration_s=None):
    """X2 handovers at the given ``(t, src, dst)`` triples."""
    rows = [(t, "HO_X2", src, dst, f"ue{k}") for k, (t, src, dst) in enumerate(pairs)]
    return make_log(rows, n_stations, duration_s=duration_s)


def make_series(station, values, bin_s=300, start_bin=0):
    values = np.asarray(values, dtype=np.int64)
    bins = np.arange(start_bin, start_bin + len(values), dtype=np.int64)
    return StationSeries(station=station, bin_s=bin_s, bins=bins, n_ue=values)


def write_text(path, text):
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    return str(path)


@pytest.fixture
def epoch():
    return dt.datetime(2017, 1, 31)


@pytest.fixture
def out_dir(tmp_path):
    path = tmp_path / "out"
    os.makedirs(path)
    return str(path)
