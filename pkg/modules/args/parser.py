import argparse
from typing import Optional, Sequence

from modules.models.measurements import FilterMode
from modules.validators.args import (
    ValidateCSVPath,
    ValidateDirectoryPath,
    ValidatePositiveInt,
    ValidateRateList,
    ValidateYAMLPath,
)

# Exit code for invalid flags and unreadable inputs
EXIT_INPUT_ERROR = 1

_MODES = [mode.value for mode in FilterMode]


class ArgParser:
    def __init__(self):
        # usage: localize.py [-h] [-v] [-s] [-ld LOG_DIR] {sim,sweep,replay,eval} ...
        self._parser = argparse.ArgumentParser(
            description="This tool localizes a tag by fusing BLE received signal strength with UWB time differences "
            "of arrival in an Extended Kalman Filter. It simulates scenarios, sweeps TDOA rates, replays measurement "
            "logs and evaluates tracks, emitting plot-ready CSV files."
        )
        # Add verbose flag
        self._parser.add_argument("-v", "--verbose", help="enable verbose logging", action="store_true")
        # Add silent flag
        self._parser.add_argument(
            "-s", "--silent", help="disable all logging to stderr, except for errors", action="store_true"
        )
        # Log directory
        self._parser.add_argument(
            "-ld",
            "--log-dir",
            help="also write a log file into this directory",
            # Custom validator that checks if the directory exists and is writable
            action=ValidateDirectoryPath,
            required=False,
        )

        commands = self._parser.add_subparsers(dest="command", required=True)

        sim = commands.add_parser("sim", help="simulate a scenario and localize the simulated tag")
        sim.add_argument("--config", help="scenario YAML file", action=ValidateYAMLPath, required=True)
        sim.add_argument("--seed", help="override the scenario seed", type=int)
        sim.add_argument("--out", help="output directory", action=ValidateDirectoryPath, required=True)
        sim.add_argument("--mode", help="filter variant (default: hybrid)", choices=_MODES, default="hybrid")

        sweep = commands.add_parser("sweep", help="Monte-Carlo sweep over TDOA rates")
        sweep.add_argument("--config", help="base scenario YAML file", action=ValidateYAMLPath, required=True)
        sweep.add_argument(
            "--tdoa-rates", help="comma-separated TDOA rates in Hz, e.g. 1/4,0.5,10", action=ValidateRateList, required=True
        )
        sweep.add_argument("--runs", help="Monte-Carlo runs per rate", action=ValidatePositiveInt, required=True)
        sweep.add_argument("--seed", help="override the base seed (run i uses seed + i)", type=int)
        sweep.add_argument("--workers", help="parallel worker processes (default: 1)", action=ValidatePositiveInt, default=1)
        sweep.add_argument("--out", help="output directory", action=ValidateDirectoryPath, required=True)

        replay = commands.add_parser("replay", help="localize from a recorded measurement log")
        replay.add_argument("--log", help="measurement log CSV", action=ValidateCSVPath, required=True)
        replay.add_argument("--anchors", help="deployment (or scenario) YAML file", action=ValidateYAMLPath, required=True)
        replay.add_argument("--truth", help="true path as a CSV with x,y columns", action=ValidateCSVPath)
        replay.add_argument("--out", help="output directory", action=ValidateDirectoryPath, required=True)
        replay.add_argument("--mode", help="filter variant (default: hybrid)", choices=_MODES, default="hybrid")

        evaluate = commands.add_parser("eval", help="evaluate an existing track against the true path")
        evaluate.add_argument("--track", help="track CSV", action=ValidateCSVPath, required=True)
        evaluate.add_argument("--truth", help="true path as a CSV with x,y columns", action=ValidateCSVPath, required=True)
        evaluate.add_argument("--out", help="output directory", action=ValidateDirectoryPath, required=True)

    def parse(self, argv: Optional[Sequence[str]] = None):
        try:
            # Return the parsed arguments
            return self._parser.parse_args(argv)
        except ValueError as e:
            # Invalid inputs are configuration errors, not usage errors
            self._parser.exit(EXIT_INPUT_ERROR, f"{self._parser.prog}: error: {e}\n")
