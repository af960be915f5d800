from edgemind.routing.predictors import HistoricalAveragePredictor, ModelPredictor, Predictor, TablePredictor
from edgemind.routing.ranking import EqualShareThroughput, rank_routes, ranking_table, route_metrics

__all__ = [
    "EqualShareThroughput",
    "HistoricalAveragePredictor",
    "ModelPredictor",
    "Predictor",
    "TablePredictor",
    "rank_routes",
    "ranking_table",
    "route_metrics",
]
