"""
CSV result files: tracks, ground truth, error series, CDF curves and summaries.
All numbers are written with 9 significant digits so reruns diff clean.
"""
import csv
import io
import os
from dataclasses import dataclass
from typing import Sequence, Union

from modules.ekf.filter import Track
from modules.io.formatting import format_number
from modules.metrics.statistics import CdfCurve
from modules.metrics.trajectory import ErrorSeries
from modules.sim.trajectory import GroundTruth
from modules.util.exceptions import OrderingError, OutputError, ParseError, ValidationError

TRACK_HEADER = ["t", "x", "y", "vx", "vy", "var_x", "var_y"]
TRUTH_HEADER = ["t", "x", "y", "vx", "vy"]
ERRORS_HEADER = ["t", "error_m"]
CDF_HEADER = ["error_m", "fraction"]
SUMMARY_HEADER = ["metric", "value"]
SWEEP_HEADER = ["rate_hz", "median_m", "p90_m"]


@dataclass(frozen=True)
class TrackRecord:
    t: float
    x: float
    y: float
    vx: float
    vy: float
    var_x: float
    var_y: float


def track_records(track: Track) -> list[TrackRecord]:
    return [
        TrackRecord(b.timestamp, *(float(v) for v in b.state), float(b.cov[0, 0]), float(b.cov[1, 1]))
        for b in track
    ]


def _to_csv(header: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, str) else format_number(v) for v in row])
    return buffer.getvalue()


def _require_rows(rows: Sequence, what: str):
    if len(rows) == 0:
        raise ValidationError(f"Cannot write an empty {what}.")


def write_track(track: Union[Track, Sequence[TrackRecord]]) -> str:
    records = track_records(track) if isinstance(track, Track) else list(track)
    _require_rows(records, "track")
    return _to_csv(TRACK_HEADER, [(r.t, r.x, r.y, r.vx, r.vy, r.var_x, r.var_y) for r in records])


def write_truth(truth: GroundTruth) -> str:
    samples = truth.get_samples()
    _require_rows(samples, "ground truth")
    return _to_csv(TRUTH_HEADER, [(s.t, *s.position, *s.velocity) for s in samples])


def write_errors(series: ErrorSeries) -> str:
    _require_rows(series.values, "error series")
    return _to_csv(ERRORS_HEADER, series.values)


def write_cdf(curve: CdfCurve) -> str:
    _require_rows(curve.points, "CDF")
    return _to_csv(CDF_HEADER, curve.points)


def write_summary(stats: Sequence[tuple[str, float]]) -> str:
    _require_rows(stats, "summary")
    return _to_csv(SUMMARY_HEADER, stats)


def write_sweep_summary(rows: Sequence[tuple[str, float, float]]) -> str:
    _require_rows(rows, "sweep summary")
    return _to_csv(SWEEP_HEADER, rows)


def _read_table(text: str, required: Sequence[str]) -> tuple[list[dict[str, float]], list[int]]:
    reader = csv.DictReader(io.StringIO(text))
    header = [h.strip() for h in (reader.fieldnames or [])]
    missing = [column for column in required if column not in header]
    if missing:
        raise ParseError(f"Missing column(s) {', '.join(missing)}", line=1)
    reader.fieldnames = header

    rows, lines = [], []
    for row in reader:
        values = {}
        for column in required:
            raw = (row.get(column) or "").strip()
            try:
                values[column] = float(raw)
            except ValueError:
                raise ParseError(f"Column '{column}' is not a number: '{raw}'", line=reader.line_num) from None
        rows.append(values)
        lines.append(reader.line_num)
    return rows, lines


def read_track(text: str) -> list[TrackRecord]:
    rows, lines = _read_table(text, TRACK_HEADER)
    records = []
    for row, line in zip(rows, lines):
        if records and row["t"] < records[-1].t:
            raise OrderingError("Track is not sorted by time", timestamp=row["t"], line=line)
        if row["var_x"] < 0 or row["var_y"] < 0:
            raise ParseError("Track variances must be non-negative", line=line)
        records.append(TrackRecord(**row))
    return records


def read_polyline(text: str) -> list[tuple[float, float]]:
    """
    Read a polyline from any CSV with 'x' and 'y' columns (a waypoint list or a truth file).
    """
    rows, _ = _read_table(text, ["x", "y"])
    if len(rows) < 2:
        raise ParseError("A polyline needs at least two points")
    return [(row["x"], row["y"]) for row in rows]


def write_file(path: str, text: str):
    try:
        with open(path, "w", newline="") as file:
            file.write(text)
    except OSError as e:
        raise OutputError(path, e.strerror or str(e)) from None


def write_outputs(out_dir: str, files: dict[str, str]):
    """
    Write a set of named CSV texts into a directory, creating it when needed.
    """
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as e:
        raise OutputError(out_dir, e.strerror or str(e)) from None
    for name, text in files.items():
        write_file(os.path.join(out_dir, name), text)
