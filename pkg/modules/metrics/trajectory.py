from dataclasses import dataclass
from typing import Sequence

import numpy as np

from modules.ekf.filter import Track
from modules.sim.trajectory import GroundTruth
from modules.util.exceptions import ValidationError


@dataclass(frozen=True, eq=False)
class ErrorSeries:
    times: np.ndarray
    errors: np.ndarray  # m

    def __post_init__(self):
        if self.times.shape != self.errors.shape:
            raise ValidationError("Error series times and values differ in length.")
        if np.any(~np.isfinite(self.errors)) or np.any(self.errors < 0):
            raise ValidationError("Trajectory errors must be finite and non-negative.")

    @property
    def values(self) -> list[tuple[float, float]]:
        return list(zip(self.times.tolist(), self.errors.tolist()))

    def __len__(self) -> int:
        return len(self.errors)


def _as_polyline(polyline: Sequence[Sequence[float]]) -> np.ndarray:
    points = np.asarray(polyline, dtype=float).reshape(-1, 2)
    if len(points) < 2:
        raise ValidationError("A polyline needs at least two points.")
    return points


def distances_to_polyline(points: np.ndarray, polyline: Sequence[Sequence[float]]) -> np.ndarray:
    """
    Distance of every point to the nearest point of the polyline.
    """
    line = _as_polyline(polyline)
    points = np.asarray(points, dtype=float).reshape(-1, 2)

    start, direction = line[:-1], np.diff(line, axis=0)
    length_sq = np.einsum("ij,ij->i", direction, direction)

    # Projection parameter of every point on every segment, clamped to the segment
    offset = points[:, None, :] - start[None, :, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        u = np.einsum("nsj,sj->ns", offset, direction) / length_sq
    u = np.clip(np.nan_to_num(u, nan=0.0), 0.0, 1.0)

    nearest = start[None, :, :] + u[:, :, None] * direction[None, :, :]
    gap = points[:, None, :] - nearest
    return np.sqrt(np.einsum("nsj,nsj->ns", gap, gap)).min(axis=1)


def point_to_polyline(p: Sequence[float], polyline: Sequence[Sequence[float]]) -> float:
    return float(distances_to_polyline(np.asarray(p, dtype=float).reshape(1, 2), polyline)[0])


def trajectory_error_series(track: Track, polyline: Sequence[Sequence[float]]) -> ErrorSeries:
    """
    Distance of each estimated position to the true path, regardless of when the tag was there.
    """
    if len(track) == 0:
        raise ValidationError("Cannot evaluate an empty track.")
    return ErrorSeries(times=track.timestamps(), errors=distances_to_polyline(track.positions(), polyline))


def time_aligned_rmse(track: Track, truth: GroundTruth) -> float:
    """
    Root mean square distance between each estimate and the true position at the same instant.
    Unlike the trajectory error this also penalizes lag along the path.
    """
    if len(track) == 0:
        raise ValidationError("Cannot evaluate an empty track.")
    true_positions = np.array([truth.position_at(t) for t in track.timestamps()])
    gaps = track.positions() - true_positions
    return float(np.sqrt(np.mean(np.einsum("ij,ij->i", gaps, gaps))))


def error_series(times: Sequence[float], positions: np.ndarray, polyline: Sequence[Sequence[float]]) -> ErrorSeries:
    """
    Trajectory error of positions read from a file rather than produced by the filter.
    """
    if len(times) == 0:
        raise ValidationError("Cannot evaluate an empty track.")
    return ErrorSeries(times=np.asarray(times, dtype=float), errors=distances_to_polyline(positions, polyline))
