import datetime as dt
import json

import pytest

from conftest import make_series, make_stations, write_text
from edgemind.config import load_routes
from edgemind.errors import ConfigError, MissingPrediction
from edgemind.mobsim import build_preset, generate_topology, simulate
from edgemind.models.routing import Leg, Route
from edgemind.routing import HistoricalAveragePredictor, TablePredictor, rank_routes, ranking_table, route_metrics
from edgemind.routing.ranking import RANKING_COLUMNS, leg_lookaheads
from edgemind.telemetry import bin_user_counts
from edgemind.utils.calendar_utils import Calendar

EPOCH = dt.datetime(2017, 1, 31)
CALENDAR = Calendar(EPOCH, 300)
DEPARTURE = EPOCH + dt.timedelta(hours=7, minutes=45)
ORIGIN = 92
STATIONS = make_stations(6)


class ConstantPredictor:
    def __init__(self, users):
        self.users = users

    def predict(self, station, origin_bin, lookahead):
        return float(self.users.get(station, 0.0)) if isinstance(self.users, dict) else float(self.users)


def route(name, *legs):
    return Route(name, tuple(Leg(station, dwell) for station, dwell in legs))


class TestLookaheads:
    def test_arrival_bins(self):
        r = route("r", (0, 300), (1, 600), (2, 300))
        origin, lookaheads = leg_lookaheads(r, DEPARTURE, CALENDAR)
        assert origin == ORIGIN
        # arrivals in bins 93, 94 and 96
        assert lookaheads == [1, 2, 4]

    def test_partial_bin_departure(self):
        r = route("r", (0, 100), (1, 100))
        origin, lookaheads = leg_lookaheads(r, DEPARTURE + dt.timedelta(seconds=250), CALENDAR)
        assert origin == ORIGIN
        assert lookaheads == [1, 2]

    def test_departure_on_bin_boundary_uses_previous_bin(self):
        origin, lookaheads = leg_lookaheads(route("r", (0, 60)), EPOCH + dt.timedelta(hours=8), CALENDAR)
        assert origin == 95
        assert lookaheads == [1]


class TestRouteMetrics:
    def test_idle_network(self):
        metrics = route_metrics(route("r", (0, 300), (3, 300)), DEPARTURE, ConstantPredictor(0), STATIONS, CALENDAR)
        assert metrics.S_hat == pytest.approx(100.0)
        assert metrics.D_o_max == 0.0

    def test_single_outage_leg(self):
        predictor = ConstantPredictor({1: 200})
        metrics = route_metrics(route("r", (0, 300), (1, 450), (2, 300)), DEPARTURE, predictor, STATIONS, CALENDAR)
        assert metrics.D_o_max == 450.0
        assert metrics.S_hat == pytest.approx((100 * 300 + 0.5 * 450 + 100 * 300) / 1050)

    def test_hand_computed_route(self):
        table = TablePredictor({(0, ORIGIN + 1): 10, (1, ORIGIN + 2): 50, (2, ORIGIN + 4): 200})
        r = route("r", (0, 300), (1, 600), (2, 300))
        metrics = route_metrics(r, DEPARTURE, table, STATIONS, CALENDAR)
        assert metrics.S_hat == pytest.approx((10 * 300 + 2 * 600 + 0.5 * 300) / 1200)
        assert metrics.D_o_max == 300.0
        assert route_metrics(r, DEPARTURE, table, STATIONS, CALENDAR, s_min_mbps=3.0).D_o_max == 900.0

    def test_outage_runs_must_be_consecutive(self):
        predictor = ConstantPredictor({0: 500, 2: 500})
        r = route("r", (0, 300), (1, 300), (2, 300))
        assert route_metrics(r, DEPARTURE, predictor, STATIONS, CALENDAR).D_o_max == 300.0

    def test_splitting_a_leg_changes_nothing(self):
        predictor = ConstantPredictor({0: 30, 1: 150})
        whole = route_metrics(route("a", (0, 600), (1, 300)), DEPARTURE, predictor, STATIONS, CALENDAR)
        split = route_metrics(route("b", (0, 300), (0, 300), (1, 300)), DEPARTURE, predictor, STATIONS, CALENDAR)
        assert split.S_hat == pytest.approx(whole.S_hat)
        assert split.D_o_max == whole.D_o_max

    def test_unknown_station(self):
        with pytest.raises(ConfigError):
            route_metrics(route("r", (17, 300)), DEPARTURE, ConstantPredictor(0), STATIONS, CALENDAR)

    def test_missing_prediction_propagates(self):
        with pytest.raises(MissingPrediction):
            route_metrics(route("r", (0, 300)), DEPARTURE, TablePredictor({}), STATIONS, CALENDAR)


class TestRankRoutes:
    def test_higher_throughput_first(self):
        predictor = ConstantPredictor({0: 50, 1: 50, 2: 5, 3: 5})
        routes = [route("busy", (0, 300), (1, 300)), route("quiet", (2, 300), (3, 300))]
        ranking = rank_routes(routes, DEPARTURE, predictor, STATIONS, CALENDAR)
        assert [r.route.name for r in ranking] == ["quiet", "busy"]
        assert [r.rank for r in ranking] == [1, 2]

    def test_outage_metric_is_ascending(self):
        predictor = ConstantPredictor({0: 500, 1: 500, 2: 500})
        routes = [route("long-outage", (0, 300), (1, 300)), route("short-outage", (2, 300), (3, 300))]
        ranking = rank_routes(routes, DEPARTURE, predictor, STATIONS, CALENDAR, metric="D_o_max")
        assert [r.route.name for r in ranking] == ["short-outage", "long-outage"]

    def test_ties_go_to_shorter_route_then_name(self):
        routes = [route("c", (0, 600)), route("b", (1, 300)), route("a", (2, 300))]
        ranking = rank_routes(routes, DEPARTURE, ConstantPredictor(0), STATIONS, CALENDAR)
        assert [r.route.name for r in ranking] == ["a", "b", "c"]

    def test_invalid_metric(self):
        with pytest.raises(ConfigError):
            rank_routes([route("a", (0, 300))], DEPARTURE, ConstantPredictor(0), STATIONS, CALENDAR, metric="latency")

    def test_no_routes(self):
        with pytest.raises(ConfigError):
            rank_routes([], DEPARTURE, ConstantPredictor(0), STATIONS, CALENDAR)

    def test_ranking_table(self):
        routes = [route("a", (0, 300)), route("b", (1, 300))]
        rankings = {DEPARTURE: rank_routes(routes, DEPARTURE, ConstantPredictor({1: 200}), STATIONS, CALENDAR)}
        table = ranking_table(rankings, 1.0)
        assert list(table.columns) == RANKING_COLUMNS
        assert table["route"].tolist() == ["a", "b"]
        assert table["departure"].unique().tolist() == [DEPARTURE.isoformat()]
        assert table["D_o_max_s"].tolist() == [0.0, 300.0]


class TestRoutes:
    def test_rejects_empty_and_non_positive_legs(self):
        with pytest.raises(ConfigError):
            Route("empty", ())
        with pytest.raises(ConfigError):
            route("r", (0, 0))

    def test_load_json_list(self, tmp_path):
        path = write_text(tmp_path / "routes.json", json.dumps([
            {"name": "a", "legs": [{"station": 0, "dwell_s": 120}, {"station": 1, "dwell_s": 60}]},
        ]))
        (loaded,) = load_routes(path)
        assert loaded.name == "a"
        assert loaded.duration_s == 180

    def test_load_routes_table(self, tmp_path):
        path = write_text(tmp_path / "routes.json", json.dumps({"routes": [{"name": "a", "legs": [{"station": 2, "dwell_s": 30}]}]}))
        assert load_routes(path)[0].legs == (Leg(2, 30.0),)

    def test_duplicate_names(self, tmp_path):
        legs = [{"station": 0, "dwell_s": 30}]
        path = write_text(tmp_path / "routes.json", json.dumps([{"name": "a", "legs": legs}, {"name": "a", "legs": legs}]))
        with pytest.raises(ConfigError):
            load_routes(path)

    def test_invalid_leg(self, tmp_path):
        path = write_text(tmp_path / "routes.json", json.dumps([{"name": "a", "legs": [{"station": 0, "dwell_s": -1}]}]))
        with pytest.raises(ConfigError):
            load_routes(path)


class TestHistoricalAverage:
    # 6-hour bins: four per day, three days
    SERIES = {0: make_series(0, [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12], bin_s=21600)}

    def test_mean_over_previous_days(self):
        predictor = HistoricalAveragePredictor(self.SERIES, 21600)
        assert predictor.predict(0, 9, 1) == pytest.approx((7 + 3) / 2)

    def test_limited_days(self):
        predictor = HistoricalAveragePredictor(self.SERIES, 21600, days=1)
        assert predictor.predict(0, 9, 1) == pytest.approx(7.0)

    def test_only_bins_known_at_origin(self):
        predictor = HistoricalAveragePredictor(self.SERIES, 21600)
        # target 7 would use bin 3, which lies after the origin
        with pytest.raises(MissingPrediction):
            predictor.predict(0, 2, 5)

    def test_missing_history_and_station(self):
        predictor = HistoricalAveragePredictor(self.SERIES, 21600)
        with pytest.raises(MissingPrediction):
            predictor.predict(0, 0, 2)
        with pytest.raises(MissingPrediction):
            predictor.predict(5, 9, 1)

    def test_bin_must_divide_a_day(self):
        with pytest.raises(ConfigError):
            HistoricalAveragePredictor(self.SERIES, 7000)


@pytest.mark.slow
def test_best_route_flips_with_corridor_peaks():
    cfg = build_preset("route-shift", {"seed": 7})
    stations = generate_topology(cfg)
    log = simulate(cfg, stations)
    predictor = HistoricalAveragePredictor(bin_user_counts(log, 300), 300)
    calendar = Calendar(log.epoch, 300)
    routes = [
        route("north", (0, 300), (1, 300), (2, 300), (3, 300)),
        route("south", (8, 300), (9, 300), (10, 300), (11, 300)),
    ]
    day = log.epoch + dt.timedelta(days=10)
    morning = rank_routes(routes, day + dt.timedelta(hours=7, minutes=45), predictor, stations, calendar)
    evening = rank_routes(routes, day + dt.timedelta(hours=17, minutes=45), predictor, stations, calendar)
    assert morning[0].route.name == "south"
    assert evening[0].route.name == "north"
