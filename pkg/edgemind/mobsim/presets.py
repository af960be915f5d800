"""Named simulation presets used by the examples and the trend checks."""
from typing import Any, Callable, Dict, Optional

from edgemind.errors import ConfigError
from edgemind.mobsim.generator import validate_config
from edgemind.models.simulation import SimConfig

COMMUTER_PROFILE = [
    0.2, 0.15, 0.1, 0.1, 0.15, 0.3, 0.6, 1.0, 1.4, 1.2, 1.0, 1.0,
    1.1, 1.0, 1.0, 1.1, 1.3, 1.6, 1.7, 1.4, 1.0, 0.7, 0.5, 0.3,
]


def _peaked(hour: int, low: float = 0.1, high: float = 3.0) -> list:
    profile = [low] * 24
    for offset, value in ((-1, high / 2), (0, high), (1, high / 2)):
        profile[(hour + offset) % 24] = value
    return profile


def corridor_40() -> Dict[str, Any]:
    """40 stations on a 7x6 grid crossed by two diagonal corridors, one week."""
    return {
        "n_stations": 40,
        "n_ues": 600,
        "days": 7,
        "layout": "grid",
        "daily_profile": COMMUTER_PROFILE,
        "sessions_per_ue_per_hour": 0.4,
        "handover_rate_per_ue": 2.0,
        "corridors": [
            {"path": [0, 1, 8, 9, 16, 17, 24, 25, 32, 33], "flow_per_hour": 60, "direction_bias": 0.5},
            {"path": [6, 13, 12, 19, 18, 25, 24, 31, 30, 37], "flow_per_hour": 60, "direction_bias": 0.5},
        ],
    }


def forecast_10() -> Dict[str, Any]:
    """One 10-station corridor with train-like platoons, 26 days (21 train + 5 test)."""
    return {
        "n_stations": 10,
        "n_ues": 200,
        "days": 26,
        "layout": "grid",
        "daily_profile": COMMUTER_PROFILE,
        "sessions_per_ue_per_hour": 0.5,
        "session_mean_s": 900,
        "handover_rate_per_ue": 1.0,
        "corridors": [
            {
                "path": [0, 1, 2, 3, 7, 6, 5, 4, 8, 9],
                "flow_per_hour": 120,
                "direction_bias": 0.7,
                "dwell_mean_s": 300,
                "platoon_mean": 8,
            }
        ],
    }


def route_shift() -> Dict[str, Any]:
    """Two parallel corridors whose loads peak at 08:00 and 18:00, two weeks."""
    return {
        "n_stations": 12,
        "n_ues": 100,
        "days": 14,
        "layout": "grid",
        "sessions_per_ue_per_hour": 0.3,
        "handover_rate_per_ue": 0.5,
        "corridors": [
            {"path": [0, 1, 2, 3], "flow_per_hour": 400, "dwell_mean_s": 300, "platoon_mean": 4, "hourly_profile": _peaked(8)},
            {"path": [8, 9, 10, 11], "flow_per_hour": 400, "dwell_mean_s": 300, "platoon_mean": 4, "hourly_profile": _peaked(18)},
        ],
    }


PRESETS: Dict[str, Callable[[], Dict[str, Any]]] = {
    "corridor-40": corridor_40,
    "forecast-10": forecast_10,
    "route-shift": route_shift,
}


def build_preset(name: str, overrides: Optional[Dict[str, Any]] = None) -> SimConfig:
    """Preset values updated with ``overrides``, validated into a SimConfig."""
    if name not in PRESETS:
        raise ConfigError(f"Unknown preset {name!r}; choose from {sorted(PRESETS)}")
    data = PRESETS[name]()
    data.update(overrides or {})
    return validate_config(data)
