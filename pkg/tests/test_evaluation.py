import numpy as np
import pytest
from scipy import stats

from conftest import handover_log, make_stations
from edgemind.errors import ConfigError, InsufficientData, ShapeError
from edgemind.evaluation import (
    cluster_delays,
    evaluate_periodic,
    mean_ratio,
    propagation_delay,
    ratio_gain,
    ratio_vs_clusters,
    split_handovers,
)
from edgemind.mobsim import build_preset, generate_topology, simulate
from edgemind.models.clustering import ClusterAssignment, RatioSummary, Strategy
from edgemind.models.telemetry import HandoverCounts, Station
from edgemind.utils.geo import EARTH_RADIUS_M


def assignment(labels, n_clusters=None):
    n_clusters = n_clusters or max(labels) + 1
    return ClusterAssignment(tuple(labels), n_clusters, 0, len(labels), Strategy.DATA_DRIVEN)


def pair_traffic(start, pairs, repeat=5):
    """Handovers in both directions for every pair, all inside one window."""
    out = []
    for r in range(repeat):
        for a, b in pairs:
            out.append((start + 2 * r, a, b))
            out.append((start + 2 * r + 1, b, a))
    return out


class TestSplit:
    def test_intra_and_inter(self):
        counts = HandoverCounts(0, 60, np.array([[0, 3, 1], [2, 0, 4], [5, 0, 0]]))
        intra, inter = split_handovers(counts, assignment([0, 0, 1]))
        assert (intra, inter) == (5, 10)

    def test_singletons_have_no_intra(self):
        counts = HandoverCounts(0, 60, np.array([[0, 3], [2, 0]]))
        assert split_handovers(counts, assignment([0, 1])) == (0, 5)

    def test_size_mismatch(self):
        with pytest.raises(ShapeError):
            split_handovers(HandoverCounts(0, 60, np.zeros((3, 3))), assignment([0, 1]))


class TestPeriodic:
    def test_window_is_scored_with_previous_association(self):
        pairs = pair_traffic(0, [(0, 1), (2, 3)]) + pair_traffic(100, [(0, 2), (1, 3)]) + pair_traffic(200, [(0, 1), (2, 3)])
        log = handover_log(pairs, 4, duration_s=300)
        points = evaluate_periodic(log, Strategy.DATA_DRIVEN, 2, 100, seed=0)
        assert [p.window_start for p in points] == [100, 200]
        assert [p.assignment.source_window for p in points] == [(0, 100), (100, 100)]
        # every scored handover crosses the association learned one period earlier
        assert [(p.intra, p.inter) for p in points] == [(0, 20), (0, 20)]
        assert [p.R for p in points] == [0.0, 0.0]

    def test_geographic_association_is_static(self):
        pairs = pair_traffic(0, [(0, 1), (2, 3)]) + pair_traffic(100, [(0, 2)]) + pair_traffic(200, [(1, 3)])
        log = handover_log(pairs, 4, duration_s=300)
        points = evaluate_periodic(log, Strategy.GEOGRAPHIC, 2, 100, seed=0)
        assert len({p.assignment for p in points}) == 1
        assert points[0].assignment.source_window == "static"

    def test_score_slots(self):
        log = handover_log(pair_traffic(0, [(0, 1)]) + pair_traffic(100, [(0, 1)]) + pair_traffic(150, [(2, 3)]), 4, duration_s=200)
        points = evaluate_periodic(log, Strategy.DATA_DRIVEN, 2, 100, seed=0, score_bin_s=50)
        assert [(p.window_start, p.window_len) for p in points] == [(100, 50), (150, 50)]

    def test_single_period_is_not_enough(self):
        log = handover_log(pair_traffic(0, [(0, 1)]), 2, duration_s=100)
        with pytest.raises(InsufficientData):
            evaluate_periodic(log, Strategy.DATA_DRIVEN, 1, 100, seed=0)


class TestRatioVsClusters:
    def make_log(self):
        pairs = []
        for start in (0, 100, 200):
            pairs += pair_traffic(start, [(0, 1), (1, 2), (3, 4), (4, 5), (2, 3)], repeat=3)
        return handover_log(pairs, 6, duration_s=300)

    def test_repeatable(self):
        log = self.make_log()
        first = ratio_vs_clusters(log, Strategy.DATA_DRIVEN, [2, 3], 100, seeds=[1, 2])
        second = ratio_vs_clusters(log, Strategy.DATA_DRIVEN, [2, 3], 100, seeds=[1, 2])
        assert first == second
        assert [s.n_clusters for s in first] == [2, 3]
        assert all(s.ci_lo <= s.mean_R <= s.ci_hi for s in first)

    def test_single_cluster_has_no_ratio(self):
        summary = ratio_vs_clusters(self.make_log(), Strategy.DATA_DRIVEN, [1], 100, seeds=[0, 1])[0]
        assert summary.mean_R is None
        assert summary.runs == 0

    def test_collects_points(self):
        collected = {}
        ratio_vs_clusters(self.make_log(), Strategy.GEOGRAPHIC, [2], 100, seeds=[4, 5], collect=collected)
        assert sorted(collected) == [(2, 4), (2, 5)]
        assert all(len(points) == 2 for points in collected.values())

    def test_needs_two_seeds(self):
        with pytest.raises(ConfigError):
            ratio_vs_clusters(self.make_log(), Strategy.DATA_DRIVEN, [2], 100, seeds=[0])


def test_mean_ratio_skips_undefined():
    log = handover_log(pair_traffic(0, [(0, 1)]) + pair_traffic(100, [(0, 1)]), 2, duration_s=200)
    points = evaluate_periodic(log, Strategy.DATA_DRIVEN, 1, 100, seed=0)
    assert mean_ratio(points) is None


def test_ratio_gain():
    dd = [RatioSummary(2, Strategy.DATA_DRIVEN, 3.0, 2.5, 3.5, 5), RatioSummary(4, Strategy.DATA_DRIVEN, None, None, None, 0)]
    geo = [RatioSummary(2, Strategy.GEOGRAPHIC, 2.0, 1.5, 2.5, 5), RatioSummary(4, Strategy.GEOGRAPHIC, 1.0, 1.0, 1.0, 5)]
    frame = ratio_gain(dd, geo)
    assert frame["n_clusters"].tolist() == [2, 4]
    assert frame["gain_pct"].iloc[0] == pytest.approx(50.0)
    assert np.isnan(frame["gain_pct"].iloc[1])


class TestDelay:
    def test_five_kilometres(self):
        offset = np.degrees(5100.0 / EARTH_RADIUS_M)
        stations = [Station(0, 37.70, -122.40), Station(1, 37.70 + offset, -122.40)]
        report = propagation_delay(stations, (37.70, -122.40))
        assert report.delays_us[0] == pytest.approx(0.0)
        assert report.delays_us[1] == pytest.approx(25.0, abs=0.1)
        assert report.max_us == pytest.approx(report.delays_us[1])

    def test_nearby_stations_stay_under_53_us(self):
        rng = np.random.default_rng(0)
        radius = np.degrees(10_500.0 / EARTH_RADIUS_M)
        angle = rng.uniform(0, 2 * np.pi, 50)
        distance = radius * np.sqrt(rng.uniform(0, 1, 50))
        stations = [
            Station(i, 37.77 + d * np.sin(a), -122.42 + d * np.cos(a) / np.cos(np.radians(37.77)))
            for i, (a, d) in enumerate(zip(angle, distance))
        ]
        report = propagation_delay(stations, (37.77, -122.42))
        assert report.max_us < 53.0
        assert np.all(report.delays_us >= 0)

    def test_rejects_bad_coordinates(self):
        with pytest.raises(ConfigError):
            propagation_delay(make_stations(2), (95.0, 0.0))

    def test_controller_site_minimizes_max_delay(self):
        stations = make_stations(5)
        reports = cluster_delays(stations, assignment([0, 0, 0, 1, 1]))
        assert [(cluster, site) for cluster, site, _ in reports] == [(0, 1), (1, 3)]
        assert reports[0][2].delays_us[1] == 0.0


@pytest.mark.slow
class TestCorridorRatio:
    @pytest.fixture(scope="class")
    def summaries(self):
        cfg = build_preset("corridor-40", {"seed": 7})
        log = simulate(cfg, generate_topology(cfg))
        seeds = [1, 2, 3]
        return {
            strategy: ratio_vs_clusters(log, strategy, (2, 4, 8, 16), 86400, seeds, n_init=3)
            for strategy in (Strategy.DATA_DRIVEN, Strategy.GEOGRAPHIC)
        }

    def test_data_driven_beats_geographic(self, summaries):
        gain = ratio_gain(summaries[Strategy.DATA_DRIVEN], summaries[Strategy.GEOGRAPHIC]).set_index("n_clusters")
        assert gain.loc[4, "gain_pct"] > 0
        assert gain.loc[8, "gain_pct"] > 0

    def test_ratio_falls_with_more_controllers(self, summaries):
        means = [s.mean_R for s in summaries[Strategy.DATA_DRIVEN]]
        assert stats.spearmanr([2, 4, 8, 16], means)[0] < 0
