"""Command-line entry point."""
import argparse
import logging
import sys
from typing import List, Optional

from dotenv import load_dotenv

from edgemind import __version__
from edgemind.commands import COMMANDS
from edgemind.config import Settings
from edgemind.errors import EdgemindError

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(levelname)s:%(asctime)s: - %(name)s - : %(message)s"

HELP = {
    "simulate": "Generate a synthetic event trace and station table",
    "cluster": "Compute a controller association for one window",
    "eval-clusters": "Ratio of intra/inter-cluster handovers versus the number of clusters",
    "forecast": "Local versus cluster-based user-count forecasting experiment",
    "rank-routes": "Rank routes by predicted throughput or outage",
}


def build_parser() -> argparse.ArgumentParser:
    """Create the argument parser with one subcommand per pipeline stage."""
    parser = argparse.ArgumentParser(prog="edgemind", description="Data-driven RAN controller association and user-count forecasting")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub = subparsers.add_parser(name, help=HELP[name])
        sub.add_argument("--config", required=True, help="Run configuration (.json or .toml)")
        sub.add_argument("--seed", type=int, default=None, help="Seed overriding the config file and EDGEMIND_SEED")
        sub.add_argument("--out", default=None, help="Output folder overriding the config file and EDGEMIND_OUTPUT_DIR")
        sub.add_argument("--log-level", default=None, choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="Logging level")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    try:
        settings = Settings.from_env()
    except EdgemindError as e:
        logging.basicConfig(format=LOG_FORMAT)
        logger.error(str(e))
        return e.exit_code

    logging.basicConfig(level=args.log_level or settings.log_level, format=LOG_FORMAT)
    try:
        COMMANDS[args.command](args.config, seed=args.seed, out=args.out, settings=settings)
    except EdgemindError as e:
        logger.error("%s failed: %s", args.command, e)
        return e.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
