import functools
import os
from dataclasses import replace
from typing import Sequence

from modules.ekf.filter import filter_feed
from modules.io.formatting import format_number
from modules.io.logs import read_measurement_log, write_measurement_log
from modules.io.outputs import (
    read_polyline,
    read_track,
    write_cdf,
    write_errors,
    write_outputs,
    write_summary,
    write_sweep_summary,
    write_track,
    write_truth,
)
from modules.metrics.statistics import empirical_cdf, summarize
from modules.metrics.trajectory import ErrorSeries, error_series, time_aligned_rmse, trajectory_error_series
from modules.models.measurements import FilterMode, check_anchor_ids, project_feed
from modules.sim.scenario import run_scenario
from modules.sim.sweep import SweepSpec, run_sweep
from modules.util.exceptions import (
    LocalizationError,
    OrderingError,
    ParseError,
    UnknownAnchorError,
    ValidationError,
)
from modules.util.logger import Logger
from modules.yaml.decoder import decodeDeployment, decodeScenario

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_RUNTIME_ERROR = 2

_INPUT_ERRORS = (ParseError, OrderingError, UnknownAnchorError, ValidationError)


def exit_code(command):
    """
    Decorator turning a command into an exit code: 1 for bad inputs, 2 for failures while running.
    """

    @functools.wraps(command)
    def wrapper(args) -> int:
        try:
            command(args)
            return EXIT_OK
        except _INPUT_ERRORS as e:
            Logger().error(str(e))
            return EXIT_INPUT_ERROR
        except (LocalizationError, OSError) as e:
            Logger().error(str(e))
            return EXIT_RUNTIME_ERROR

    return wrapper


def _read(path: str) -> str:
    try:
        with open(path, "r", newline="") as file:
            return file.read()
    except OSError as e:
        raise ParseError(f"Cannot read {path}: {e.strerror or e}") from None


def _evaluation_files(series: ErrorSeries, extra_rows: Sequence[tuple[str, float]] = ()) -> dict[str, str]:
    summary = summarize(series.errors)
    Logger().info(
        f"Trajectory error over {summary.count} estimates: median {summary.median:.3f} m, "
        f"p90 {summary.p90:.3f} m, max {summary.max:.3f} m."
    )
    return {
        "errors.csv": write_errors(series),
        "cdf.csv": write_cdf(empirical_cdf(series.errors)),
        "summary.csv": write_summary(summary.rows() + list(extra_rows)),
    }


@exit_code
def cmd_sim(args):
    cfg = decodeScenario(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    mode = FilterMode(args.mode)

    Logger().info(f"Simulating scenario {args.config} (seed {cfg.seed}, mode {mode.value})...")
    result = run_scenario(cfg, mode)
    polyline = result.truth.get_polyline()
    series = trajectory_error_series(result.track, polyline)

    files = {
        "truth.csv": write_truth(result.truth),
        "measurements.csv": write_measurement_log(result.feed),
        "track.csv": write_track(result.track),
    }
    files.update(
        _evaluation_files(
            series,
            [
                ("rmse_time_aligned_m", time_aligned_rmse(result.track, result.truth)),
                ("ble_epochs", result.ble_epochs()),
                ("uwb_epochs", result.uwb_epochs()),
            ],
        )
    )
    write_outputs(args.out, files)
    Logger().info(f"Wrote {len(files)} files to {args.out}.")


@exit_code
def cmd_sweep(args):
    cfg = decodeScenario(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    spec = SweepSpec(tdoa_rates=tuple(args.tdoa_rates), runs=args.runs, base=cfg, out_dir=args.out)

    result = run_sweep(spec, workers=args.workers)

    files = {}
    rows = [("rss_only", result.baseline.mean_median(), result.baseline.mean_p90())]
    for line in result.lines:
        label = format_number(line.rate)
        files[f"cdf_tdoa_{label}hz.csv"] = write_cdf(line.cdf)
        rows.append((label, line.mean_median(), line.mean_p90()))
        Logger().info(f"TDOA {label} Hz: mean median error {line.mean_median():.3f} m over {spec.runs} run(s).")
    files["sweep_summary.csv"] = write_sweep_summary(rows)
    write_outputs(spec.out_dir, files)
    Logger().info(f"RSS-only baseline: mean median error {result.baseline.mean_median():.3f} m.")


@exit_code
def cmd_replay(args):
    feed = read_measurement_log(_read(args.log))
    setup = decodeDeployment(args.anchors)
    check_anchor_ids(feed, setup.anchors)
    mode = FilterMode(args.mode)

    if mode == FilterMode.HYBRID and not any(batch.tdoa for batch in feed):
        Logger().info("The log holds no TDOA readings, the hybrid filter runs on RSS only.")
    if not project_feed(feed, mode):
        Logger().warning(f"No readings usable in {mode.value} mode, the track holds the initial belief only.")

    track = filter_feed(feed, setup, mode)
    files = {"track.csv": write_track(track)}
    if args.truth:
        polyline = read_polyline(_read(args.truth))
        files.update(_evaluation_files(trajectory_error_series(track, polyline)))
    write_outputs(args.out, files)
    Logger().info(f"Replayed {len(feed)} batch(es) from {os.path.basename(args.log)} into {args.out}.")


@exit_code
def cmd_eval(args):
    records = read_track(_read(args.track))
    if not records:
        raise ValidationError(f"The track {args.track} is empty.")
    polyline = read_polyline(_read(args.truth))

    series = error_series([r.t for r in records], [(r.x, r.y) for r in records], polyline)
    write_outputs(args.out, _evaluation_files(series))


COMMANDS = {
    "sim": cmd_sim,
    "sweep": cmd_sweep,
    "replay": cmd_replay,
    "eval": cmd_eval,
}
