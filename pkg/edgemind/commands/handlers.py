"""Subcommand handlers: load a run config, run one pipeline stage, write its outputs."""
import logging
import os
from dataclasses import dataclass
from importlib import metadata
from typing import Dict, List, Optional, Tuple, Type

import numpy as np
import pandas as pd

import edgemind
from edgemind.clustering import build_transition_graph, cluster_data_driven, cluster_geographic
from edgemind.config import (
    ClusterRunConfig,
    ConfigT,
    EvalRunConfig,
    ForecastRunConfig,
    RankRunConfig,
    Settings,
    SimulateRunConfig,
    TraceRunConfig,
    load_routes,
    load_run_config,
    resolve_hours,
)
from edgemind.errors import ConfigError
from edgemind.evaluation import (
    cluster_delay_frame,
    cluster_delays,
    delay_frame,
    points_frame,
    propagation_delay,
    ratio_gain,
    ratio_vs_clusters,
    summary_frame,
)
from edgemind.forecast import (
    DirectForecaster,
    ExperimentPlan,
    residual_analysis,
    rmse_reduction,
    run_experiment,
    training_size_sweep,
)
from edgemind.mobsim import build_preset, corridor_membership, generate_topology, simulate
from edgemind.mobsim.generator import validate_config as validate_sim_config
from edgemind.models.clustering import ClusterAssignment, Strategy
from edgemind.models.telemetry import EventLog
from edgemind.routing import HistoricalAveragePredictor, ModelPredictor, rank_routes, ranking_table
from edgemind.routing.predictors import Predictor
from edgemind.telemetry import bin_user_counts, count_handovers, ingest_events, load_stations, write_events, write_series, write_stations
from edgemind.utils.calendar_utils import Calendar
from edgemind.utils.file_handler import ensure_dir, file_sha256, load_structured_file, write_json
from edgemind.utils.report_writer import save_table, table_path

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
TRACKED_PACKAGES = ("numpy", "scipy", "pandas", "scikit-learn", "networkx", "statsmodels", "pydantic")


@dataclass(frozen=True)
class RunContext:
    command: str
    config_path: str
    out_dir: str
    seed: Optional[int]
    table_format: str
    settings: Settings

    def path(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    def table(self, stem: str) -> str:
        return self.path(table_path(stem, self.table_format))

    def require_seed(self) -> int:
        if self.seed is None:
            raise ConfigError(f"{self.command} needs a seed: pass --seed, set 'seed' in the config or EDGEMIND_SEED")
        return self.seed


def _load(command: str, model: Type[ConfigT], config_path: str, seed: Optional[int], out: Optional[str], settings: Optional[Settings]) -> Tuple[ConfigT, RunContext]:
    """Validate the config file and resolve seed, output folder and table format (flag > file > env > default)."""
    settings = settings or Settings.from_env()
    config = load_run_config(model, config_path)
    context = RunContext(
        command=command,
        config_path=config_path,
        out_dir=ensure_dir(out or config.out or settings.output_dir),
        seed=next((s for s in (seed, config.seed, settings.seed) if s is not None), None),
        table_format=config.table_format or settings.table_format,
        settings=settings,
    )
    logger.info("Running %s with %s into %s", command, config_path, context.out_dir)
    return config, context


def _versions() -> Dict[str, str]:
    versions = {"edgemind": edgemind.__version__}
    for package in TRACKED_PACKAGES:
        try:
            versions[package] = metadata.version(package)
        except metadata.PackageNotFoundError:
            versions[package] = "unknown"
    return versions


def write_manifest(context: RunContext, outputs: Dict[str, str]) -> str:
    """Provenance record: config hash, seed, package versions and output checksums (no timestamps)."""
    manifest = {
        "command": context.command,
        "config_sha256": file_sha256(context.config_path),
        "seed": context.seed,
        "versions": _versions(),
        "outputs": {name: file_sha256(path) for name, path in sorted(outputs.items())},
    }
    return write_json(context.path(MANIFEST_NAME), manifest)


def _finish(context: RunContext, outputs: Dict[str, str]) -> Dict[str, str]:
    outputs = {os.path.basename(path): path for path in outputs.values()}
    write_manifest(context, outputs)
    outputs[MANIFEST_NAME] = context.path(MANIFEST_NAME)
    logger.info("%s wrote %d files", context.command, len(outputs))
    return outputs


def _load_trace(config: TraceRunConfig) -> EventLog:
    stations = load_stations(config.stations)
    return ingest_events(config.events, stations, epoch=config.epoch, duration_s=config.duration_s)


def _load_assignment(file_path: Optional[str]) -> Optional[ClusterAssignment]:
    if file_path is None:
        return None
    try:
        return ClusterAssignment.from_dict(load_structured_file(file_path))
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"Error reading assignment {file_path}: {str(e)}") from e


def cmd_simulate(config_path: str, seed: Optional[int] = None, out: Optional[str] = None, settings: Optional[Settings] = None) -> Dict[str, str]:
    """
    Generate a synthetic trace.

    Writes events.csv, stations.csv and ground_truth.json (corridor
    membership, epoch and duration of the trace).
    """
    config, context = _load("simulate", SimulateRunConfig, config_path, seed, out, settings)
    overrides = dict(config.simulation)
    resolved = context.seed if context.seed is not None else overrides.get("seed")
    if resolved is None:
        context.require_seed()
    overrides["seed"] = resolved
    context = RunContext(context.command, context.config_path, context.out_dir, int(resolved), context.table_format, context.settings)
    sim = build_preset(config.preset, overrides) if config.preset else validate_sim_config(overrides)

    stations = generate_topology(sim)
    log = simulate(sim, stations)
    outputs = {
        "events": write_events(log, context.path("events.csv")),
        "stations": write_stations(stations, context.path("stations.csv")),
        "ground_truth": write_json(
            context.path("ground_truth.json"),
            {
                "epoch": sim.start.isoformat(),
                "duration_s": sim.duration_s,
                "corridor_membership": corridor_membership(sim).tolist(),
                "n_stations": sim.n_stations,
                "seed": sim.seed,
            },
        ),
    }
    return _finish(context, outputs)


def _dump_matrix(matrix: np.ndarray, path: str, table_format: str) -> str:
    return save_table(pd.DataFrame(matrix), path, table_format)


def cmd_cluster(config_path: str, seed: Optional[int] = None, out: Optional[str] = None, settings: Optional[Settings] = None) -> Dict[str, str]:
    """Compute one controller association and write assignment.json (plus H, W, L dumps for data-driven runs)."""
    config, context = _load("cluster", ClusterRunConfig, config_path, seed, out, settings)
    run_seed = context.require_seed()
    log = _load_trace(config)
    outputs: Dict[str, str] = {}

    if config.strategy is Strategy.GEOGRAPHIC:
        assignment = cluster_geographic(
            log.stations, config.n_clusters, run_seed, config.min_size, config.max_size, config.restarts, config.max_iter
        )
    else:
        window_len = config.window_len or max(log.end_s - config.window_start, 1)
        counts = count_handovers(log, config.window_start, window_len)
        assignment = cluster_data_driven(
            counts, config.n_clusters, run_seed, config.min_size, config.max_size, config.restarts, config.max_iter
        )
        if config.dump_matrices:
            graph = build_transition_graph(counts)
            for name in ("H", "W", "L"):
                outputs[name] = _dump_matrix(getattr(graph, name), context.table(f"matrix_{name}"), context.table_format)

    logger.info("Cluster sizes: %s", assignment.sizes.tolist())
    outputs["assignment"] = write_json(context.path("assignment.json"), assignment.to_dict())
    return _finish(context, outputs)


def _eval_seeds(config: EvalRunConfig, context: RunContext) -> List[int]:
    if config.seeds is not None:
        return list(config.seeds)
    base = context.require_seed()
    return [int(s) for s in np.random.SeedSequence(base).generate_state(config.n_seeds)]


def cmd_eval_clusters(config_path: str, seed: Optional[int] = None, out: Optional[str] = None, settings: Optional[Settings] = None) -> Dict[str, str]:
    """
    Ratio R versus N_c for each strategy, per-window curves for the first
    seed, the data-driven gain and propagation delay tables.
    """
    config, context = _load("eval-clusters", EvalRunConfig, config_path, seed, out, settings)
    seeds = _eval_seeds(config, context)
    log = _load_trace(config)
    outputs: Dict[str, str] = {}

    summaries = {}
    for strategy in config.strategies:
        collected: Dict[Tuple[int, int], list] = {}
        summaries[strategy] = ratio_vs_clusters(
            log, strategy, config.n_clusters, config.period_s, seeds, config.score_bin_s, config.restarts, collected
        )
        for n_clusters in config.n_clusters:
            stem = f"ratio_{strategy.value}_{n_clusters}"
            outputs[stem] = save_table(points_frame(collected[(n_clusters, seeds[0])]), context.table(stem), context.table_format)

    frames = [summary_frame(s) for s in summaries.values()]
    outputs["ratio_summary"] = save_table(pd.concat(frames, ignore_index=True), context.table("ratio_summary"), context.table_format)
    if Strategy.DATA_DRIVEN in summaries and Strategy.GEOGRAPHIC in summaries:
        gain = ratio_gain(summaries[Strategy.DATA_DRIVEN], summaries[Strategy.GEOGRAPHIC])
        outputs["ratio_gain"] = save_table(gain, context.table("ratio_gain"), context.table_format)

    per_cluster = []
    for n_clusters in config.n_clusters:
        assignment = cluster_geographic(log.stations, n_clusters, seeds[0], n_init=config.restarts)
        frame = cluster_delay_frame(cluster_delays(log.stations, assignment))
        frame.insert(0, "n_clusters", n_clusters)
        per_cluster.append(frame)
    outputs["cluster_delay"] = save_table(pd.concat(per_cluster, ignore_index=True), context.table("cluster_delay"), context.table_format)
    if config.datacenter is not None:
        report = propagation_delay(log.stations, config.datacenter)
        logger.info("Datacenter delay: mean %.2f us, max %.2f us", report.mean_us, report.max_us)
        outputs["delay"] = save_table(delay_frame(log.stations, report), context.table("delay"), context.table_format)
    return _finish(context, outputs)


def _plan(config: ForecastRunConfig, context: RunContext, seed: int) -> ExperimentPlan:
    return ExperimentPlan(
        train_end=config.train_end,
        lookaheads=tuple(config.lookaheads),
        windows=tuple(config.windows),
        methods=tuple(config.methods),
        scopes=tuple(config.scopes),
        bin_s=config.bin_s,
        hours=resolve_hours(config.hours),
        weekday_flag=config.weekday_flag,
        window_policy=config.window_policy,
        clusters=tuple(config.clusters) if config.clusters is not None else None,
        train_start=config.train_start,
        test_end=config.test_end,
        folds=config.folds,
        seed=seed,
        rf_trees=config.rf_trees or context.settings.rf_trees,
        full_rf_grid=config.full_rf_grid,
        max_train_rows=config.max_train_rows,
        n_jobs=context.settings.n_jobs,
        keep_predictions=config.export_predictions,
    )


def cmd_forecast(config_path: str, seed: Optional[int] = None, out: Optional[str] = None, settings: Optional[Settings] = None) -> Dict[str, str]:
    """
    Run the forecasting experiment and write per-station scores, aggregates,
    choices and the RMSE reduction. Optional outputs: test predictions with
    their residual table, and a training-size sweep.
    """
    config, context = _load("forecast", ForecastRunConfig, config_path, seed, out, settings)
    plan = _plan(config, context, context.require_seed())
    log = _load_trace(config)
    series = bin_user_counts(log, plan.bin_s)
    assignment = _load_assignment(config.assignment)
    report = run_experiment(series, assignment, plan, epoch=log.epoch)

    outputs = {
        "series": write_series(series, context.path("series.csv")),
        "scores": save_table(report.to_frame(), context.table("forecast_scores"), context.table_format),
        "summary": save_table(report.aggregate(), context.table("forecast_summary"), context.table_format),
        "choices": write_json(context.path("forecast_choices.json"), report.choices_frame().to_dict(orient="records")),
        "reduction": save_table(rmse_reduction(report), context.table("rmse_reduction"), context.table_format),
    }
    if config.export_predictions:
        predictions = report.predictions_frame()
        outputs["predictions"] = save_table(predictions, context.table("forecast_predictions"), context.table_format)
        residuals = residual_analysis(predictions, config.residual_bins)
        outputs["residuals"] = save_table(residuals, context.table("forecast_residuals"), context.table_format)
    if config.train_sizes_h:
        sweep = training_size_sweep(series, assignment, plan, config.train_sizes_h, epoch=log.epoch)
        outputs["train_size"] = save_table(sweep, context.table("forecast_train_size"), context.table_format)
    return _finish(context, outputs)


def _predictor(config: RankRunConfig, context: RunContext, log: EventLog, series) -> Predictor:
    if config.predictor == "historical":
        return HistoricalAveragePredictor(series, config.bin_s)
    forecaster = DirectForecaster(
        method=config.method,
        scope=config.scope,
        window=config.window,
        max_lookahead=config.max_lookahead,
        bin_s=config.bin_s,
        hours=resolve_hours(config.hours),
        seed=context.require_seed(),
        rf_trees=config.rf_trees or context.settings.rf_trees,
        n_jobs=context.settings.n_jobs,
    )
    forecaster.fit(series, log.epoch, _load_assignment(config.assignment), config.train_end)
    return ModelPredictor(forecaster)


def cmd_rank_routes(config_path: str, seed: Optional[int] = None, out: Optional[str] = None, settings: Optional[Settings] = None) -> Dict[str, str]:
    """Rank the configured routes at every departure time and write ranking.csv."""
    config, context = _load("rank-routes", RankRunConfig, config_path, seed, out, settings)
    log = _load_trace(config)
    routes = load_routes(config.routes)
    series = bin_user_counts(log, config.bin_s)
    predictor = _predictor(config, context, log, series)
    calendar = Calendar(log.epoch, config.bin_s)

    rankings = {
        departure: rank_routes(routes, departure, predictor, log.stations, calendar, config.metric, config.s_min_mbps)
        for departure in config.departures
    }
    outputs = {"ranking": save_table(ranking_table(rankings, config.s_min_mbps), context.table("ranking"), context.table_format)}
    return _finish(context, outputs)


COMMANDS = {
    "simulate": cmd_simulate,
    "cluster": cmd_cluster,
    "eval-clusters": cmd_eval_clusters,
    "forecast": cmd_forecast,
    "rank-routes": cmd_rank_routes,
}
