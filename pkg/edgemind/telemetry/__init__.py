"""Trace ingestion and binning."""
from edgemind.telemetry.binning import bin_user_counts, count_handovers, iter_windows, pair_sessions
from edgemind.telemetry.ingest import ingest_events, load_stations, write_events, write_series, write_stations

__all__ = [
    "bin_user_counts",
    "count_handovers",
    "ingest_events",
    "iter_windows",
    "load_stations",
    "pair_sessions",
    "write_events",
    "write_series",
    "write_stations",
]
