#!/usr/bin/env python3
"""
Script to run the whole pipeline end to end on freshly simulated traces.
"""

import subprocess
import sys

STEPS = [
    ("simulate", "configs/simulate_corridor.toml"),
    ("cluster", "configs/cluster.toml"),
    ("eval-clusters", "configs/eval_clusters.toml"),
    ("simulate", "configs/simulate_forecast.toml"),
    ("forecast", "configs/forecast.toml"),
    ("simulate", "configs/simulate_routes.toml"),
    ("rank-routes", "configs/rank_routes.toml"),
]


def run_step(command, config, extra):
    """Run one edgemind subcommand and return its exit code."""
    print(f"Running {command} with {config}...")
    process = subprocess.run([sys.executable, "-m", "edgemind", command, "--config", config, *extra])
    return process.returncode


def main():
    """Run every step in order, stopping at the first failure."""
    extra = sys.argv[1:]
    for command, config in STEPS:
        code = run_step(command, config, extra)
        if code != 0:
            print(f"✗ {command} failed with exit code {code}")
            return code
        print(f"✓ {command} done")
    print("\nAll steps finished. Results are under output/.")
    return 0


if __name__ == "__main__":
    sys.exit(main())
