from edgemind.commands.handlers import (
    COMMANDS,
    cmd_cluster,
    cmd_eval_clusters,
    cmd_forecast,
    cmd_rank_routes,
    cmd_simulate,
)

__all__ = ["COMMANDS", "cmd_cluster", "cmd_eval_clusters", "cmd_forecast", "cmd_rank_routes", "cmd_simulate"]
