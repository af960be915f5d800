"""Route throughput and outage metrics from predicted user counts."""
import datetime as dt
import logging
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import pandas as pd

from edgemind.errors import ConfigError
from edgemind.models.routing import RankedRoute, Route, RouteMetrics
from edgemind.models.telemetry import Station
from edgemind.routing.predictors import Predictor
from edgemind.utils.calendar_utils import Calendar

logger = logging.getLogger(__name__)

RANKING_COLUMNS = ["route", "departure", "S_hat_mbps", "D_o_max_s", "rank", "outage_rule"]
METRICS = ("S_hat", "D_o_max")


class EqualShareThroughput:
    """Each user gets capacity / max(1, users)."""

    def __call__(self, capacity_mbps: float, users: float) -> float:
        return capacity_mbps / max(1.0, users)


def outage_rule(s_min_mbps: float) -> str:
    return f"per-user throughput < {s_min_mbps:g} Mbit/s"


def leg_lookaheads(route: Route, departure: dt.datetime, calendar: Calendar) -> Tuple[int, List[int]]:
    """
    Origin bin (the last bin completed before departure) and, per leg, the
    L whose bin contains the leg's arrival. L is at least 1.
    """
    origin = calendar.bin_of(departure) - 1
    lookaheads = []
    offset = 0.0
    for leg in route.legs:
        arrival = calendar.bin_of(departure + dt.timedelta(seconds=offset))
        lookaheads.append(max(1, arrival - origin))
        offset += leg.dwell_s
    return origin, lookaheads


def route_metrics(
    route: Route,
    departure: dt.datetime,
    predictor: Predictor,
    stations: Sequence[Station],
    calendar: Calendar,
    s_min_mbps: float = 1.0,
    throughput: Optional[EqualShareThroughput] = None,
) -> RouteMetrics:
    """
    Dwell-weighted mean throughput and the longest run of outage dwell.

    Args:
        route: Ordered legs with dwell times
        departure: Departure time
        predictor: Source of predicted user counts
        stations: Station table (capacities)
        calendar: Calendar of the prediction bins
        s_min_mbps: Per-user throughput below which a leg is in outage

    Returns:
        RouteMetrics
    """
    throughput = throughput or EqualShareThroughput()
    capacities: Dict[int, float] = {s.id: s.capacity_mbps for s in stations}
    origin, lookaheads = leg_lookaheads(route, departure, calendar)

    weighted = 0.0
    longest = run = 0.0
    for leg, lookahead in zip(route.legs, lookaheads):
        if leg.station not in capacities:
            raise ConfigError(f"route {route.name!r} visits unknown station {leg.station}")
        users = predictor.predict(leg.station, origin, lookahead)
        rate = throughput(capacities[leg.station], users)
        weighted += rate * leg.dwell_s
        run = run + leg.dwell_s if rate < s_min_mbps else 0.0
        longest = max(longest, run)
    return RouteMetrics(S_hat=weighted / route.duration_s, D_o_max=longest)


def _sort_key(metric: str, route: Route, metrics: RouteMetrics) -> Tuple[float, float, str]:
    primary = -metrics.S_hat if metric == "S_hat" else metrics.D_o_max
    return primary, route.duration_s, route.name


def rank_routes(
    routes: Sequence[Route],
    departure: dt.datetime,
    predictor: Predictor,
    stations: Sequence[Station],
    calendar: Calendar,
    metric: str = "S_hat",
    s_min_mbps: float = 1.0,
) -> List[RankedRoute]:
    """Rank routes by descending S_hat or ascending D_o_max; ties go to the shorter route, then the name."""
    if metric not in METRICS:
        raise ConfigError(f"metric must be one of {METRICS}, got {metric!r}")
    if not routes:
        raise ConfigError("at least one route is required")
    scored = [(route, route_metrics(route, departure, predictor, stations, calendar, s_min_mbps)) for route in routes]
    scored.sort(key=lambda item: _sort_key(metric, *item))
    ranking = [RankedRoute(rank + 1, route, metrics) for rank, (route, metrics) in enumerate(scored)]
    logger.info("Best route at %s by %s: %s", departure.isoformat(), metric, ranking[0].route.name)
    return ranking


def ranking_table(rankings: Mapping[dt.datetime, Sequence[RankedRoute]], s_min_mbps: float = 1.0) -> pd.DataFrame:
    """Rows ``route,departure,S_hat_mbps,D_o_max_s,rank`` plus the outage rule used."""
    rows = [
        {
            "route": ranked.route.name,
            "departure": departure.isoformat(),
            "S_hat_mbps": ranked.metrics.S_hat,
            "D_o_max_s": ranked.metrics.D_o_max,
            "rank": ranked.rank,
            "outage_rule": outage_rule(s_min_mbps),
        }
        for departure, ranking in rankings.items()
        for ranked in ranking
    ]
    return pd.DataFrame(rows, columns=RANKING_COLUMNS)
