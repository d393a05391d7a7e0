import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from modules.util.exceptions import ValidationError


@dataclass(frozen=True)
class TruthSample:
    t: float
    position: tuple[float, float]
    velocity: tuple[float, float]


class GroundTruth:
    """
    Constant-speed traversal of a waypoint polyline. Direction changes instantly at the corners;
    once the end of the path is reached the tag rests on the final waypoint.
    """

    def __init__(self, waypoints: Sequence[Sequence[float]], speed: float, samples: Sequence[TruthSample] = ()):
        self._polyline = np.array(waypoints, dtype=float).reshape(-1, 2)
        self._speed = speed
        self._samples = list(samples)

        segments = np.diff(self._polyline, axis=0)
        self._lengths = np.hypot(segments[:, 0], segments[:, 1])
        self._cumulative = np.concatenate([[0.0], np.cumsum(self._lengths)])

    def get_polyline(self) -> np.ndarray:
        return self._polyline.copy()

    def get_samples(self) -> list[TruthSample]:
        return list(self._samples)

    def get_speed(self) -> float:
        return self._speed

    def path_length(self) -> float:
        return float(self._cumulative[-1])

    def path_duration(self) -> float:
        return self.path_length() / self._speed

    def _locate(self, t: float) -> tuple[int, float]:
        s = self._speed * t
        idx = int(np.searchsorted(self._cumulative, s, side="right")) - 1
        return min(max(idx, 0), len(self._lengths) - 1), s

    def position_at(self, t: float) -> np.ndarray:
        if t >= self.path_duration():
            return self._polyline[-1].copy()
        idx, s = self._locate(max(t, 0.0))
        fraction = (s - self._cumulative[idx]) / self._lengths[idx]
        start, end = self._polyline[idx], self._polyline[idx + 1]
        return start + fraction * (end - start)

    def velocity_at(self, t: float) -> np.ndarray:
        if t >= self.path_duration():
            return np.zeros(2)
        idx, _ = self._locate(max(t, 0.0))
        direction = (self._polyline[idx + 1] - self._polyline[idx]) / self._lengths[idx]
        return self._speed * direction


def build_trajectory(
    waypoints: Sequence[Sequence[float]], speed: float, tick: float, duration: Optional[float] = None
) -> GroundTruth:
    """
    Sample a constant-speed walk along the waypoints every tick seconds, from t=0 to the
    duration (by default the time needed to walk the whole path).
    """
    if len(waypoints) < 2:
        raise ValidationError("A trajectory needs at least two waypoints.")
    if not (math.isfinite(speed) and speed > 0):
        raise ValidationError("The walking speed must be positive.")
    if not (math.isfinite(tick) and tick > 0):
        raise ValidationError("The sampling tick must be positive.")
    for idx, (a, b) in enumerate(zip(waypoints[:-1], waypoints[1:])):
        if tuple(a) == tuple(b):
            raise ValidationError(f"Waypoints #{idx} and #{idx + 1} are identical.")

    truth = GroundTruth(waypoints, speed)
    end = truth.path_duration() if duration is None else duration
    if not (math.isfinite(end) and end >= 0):
        raise ValidationError("The trajectory duration must be non-negative.")

    samples = []
    for k in range(int(math.floor(end / tick + 1e-9)) + 1):
        t = k * tick
        p, v = truth.position_at(t), truth.velocity_at(t)
        samples.append(TruthSample(t=t, position=(float(p[0]), float(p[1])), velocity=(float(v[0]), float(v[1]))))
    return GroundTruth(waypoints, speed, samples)
