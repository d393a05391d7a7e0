import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from modules.ekf.belief import FilterConfig
from modules.ekf.filter import FilterSetup, Track, filter_feed
from modules.io.formatting import canonical
from modules.models.elements import SPEED_OF_LIGHT, Anchor, Deployment, DwnaParams, PathLossParams, Technology
from modules.models.measurements import FilterMode, MeasurementBatch, RssReading, TdoaReading
from modules.sim.schedule import schedule
from modules.sim.sensors import DEFAULT_RSS_SIGMA_DB, default_tdoa_sigma, simulate_rss, simulate_tdoa
from modules.sim.trajectory import GroundTruth, build_trajectory
from modules.util.exceptions import ValidationError
from modules.util.logger import Logger

_MAX_SEED = 2 ** 64 - 1

# Default room: 10 m x 10 m, walk 2 m inside the walls
_ROOM_SIZE = 10.0
_WALK_MARGIN = 2.0


@dataclass(frozen=True)
class ScenarioConfig:
    """
    Everything that defines one simulated run: deployment, walk, measurement streams,
    noise, models, filter tuning and seed.
    """

    anchors: Deployment
    waypoints: tuple[tuple[float, float], ...]
    speed: float = 1.4  # m/s
    rss_rate: float = 10.0  # Hz
    tdoa_rate: float = 0.5  # Hz
    rss_shadow_sigma: float = 3.0  # dB
    toa_sigma: float = 0.2e-9  # s
    path_loss: PathLossParams = PathLossParams()
    dwna: DwnaParams = DwnaParams()
    duration: Optional[float] = None  # s, defaults to the time needed to walk the path
    seed: int = 0
    rss_sigma: Optional[float] = None  # dB, assumed by the filter
    tdoa_sigma: Optional[float] = None  # m, assumed by the filter
    rss_resolution: Optional[float] = None  # dB
    filter: FilterConfig = field(default_factory=FilterConfig)

    def __post_init__(self):
        object.__setattr__(self, "waypoints", tuple((float(x), float(y)) for x, y in self.waypoints))
        if len(self.waypoints) < 2:
            raise ValidationError("A scenario needs at least two waypoints.")
        for name in ("speed", "rss_rate", "tdoa_rate"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValidationError(f"{name} must be positive, got {value}.")
        for name in ("rss_shadow_sigma", "toa_sigma"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValidationError(f"{name} must be non-negative, got {value}.")
        for name in ("rss_sigma", "tdoa_sigma", "rss_resolution", "duration"):
            value = getattr(self, name)
            if value is not None and not (math.isfinite(value) and value > 0):
                raise ValidationError(f"{name} must be positive when given, got {value}.")
        if not (0 <= self.seed <= _MAX_SEED):
            raise ValidationError(f"The seed must be a 64-bit unsigned integer, got {self.seed}.")

    @property
    def toa_sigma_m(self) -> float:
        """Reception-time sigma expressed as a range (m)."""
        return SPEED_OF_LIGHT * self.toa_sigma

    def reading_rss_sigma(self) -> float:
        if self.rss_sigma is not None:
            return self.rss_sigma
        return self.rss_shadow_sigma if self.rss_shadow_sigma > 0 else DEFAULT_RSS_SIGMA_DB

    def reading_tdoa_sigma(self) -> float:
        return self.tdoa_sigma if self.tdoa_sigma is not None else default_tdoa_sigma(self.toa_sigma)

    def filter_setup(self) -> FilterSetup:
        return FilterSetup(anchors=self.anchors, path_loss=self.path_loss, dwna=self.dwna, config=self.filter)


@dataclass(frozen=True, eq=False)
class ScenarioResult:
    truth: GroundTruth
    track: Track
    feed: list[MeasurementBatch]
    mode: FilterMode

    def ble_epochs(self) -> int:
        return sum(1 for batch in self.feed if batch.rss)

    def uwb_epochs(self) -> int:
        return sum(1 for batch in self.feed if batch.tdoa)


def default_scenario(seed: int = 0) -> ScenarioConfig:
    """
    BLE anchors at the wall midpoints and UWB anchors in the corners of a 10 m x 10 m room,
    with a rectangular walk 2 m inside the walls.
    """
    half, size = _ROOM_SIZE / 2.0, _ROOM_SIZE
    anchors = [
        Anchor("B1", half, 0.0, Technology.BLE),
        Anchor("B2", size, half, Technology.BLE),
        Anchor("B3", half, size, Technology.BLE),
        Anchor("B4", 0.0, half, Technology.BLE),
        Anchor("U1", 0.0, 0.0, Technology.UWB),
        Anchor("U2", size, 0.0, Technology.UWB),
        Anchor("U3", size, size, Technology.UWB),
        Anchor("U4", 0.0, size, Technology.UWB),
    ]
    lo, hi = _WALK_MARGIN, size - _WALK_MARGIN
    waypoints = ((lo, lo), (hi, lo), (hi, hi), (lo, hi), (lo, lo))
    return ScenarioConfig(anchors=Deployment(anchors), waypoints=waypoints, seed=seed)


def _noise_generators(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    # One independent stream per technology: changing a rate never shifts the other stream
    rss_seq, tdoa_seq = np.random.SeedSequence(seed).spawn(2)
    return np.random.Generator(np.random.PCG64(rss_seq)), np.random.Generator(np.random.PCG64(tdoa_seq))


def simulate_feed(cfg: ScenarioConfig, truth: GroundTruth) -> list[MeasurementBatch]:
    """
    Measurement feed of a scenario. Values are stored at log precision so that the feed
    read back from a measurement log is identical to the simulated one.
    """
    duration = cfg.duration if cfg.duration is not None else truth.path_duration()
    rss_rng, tdoa_rng = _noise_generators(cfg.seed)
    ble, uwb = cfg.anchors.get_ble_anchors(), cfg.anchors.get_uwb_anchors()
    rss_sigma, tdoa_sigma = canonical(cfg.reading_rss_sigma()), canonical(cfg.reading_tdoa_sigma())

    feed = []
    for epoch in schedule(cfg.rss_rate, cfg.tdoa_rate, duration):
        pos = truth.position_at(epoch.timestamp)
        rss, tdoa = [], []
        if epoch.rss and ble:
            rss = [
                RssReading(r.anchor_id, canonical(r.value), rss_sigma)
                for r in simulate_rss(pos, ble, cfg.path_loss, cfg.rss_shadow_sigma, rss_rng, resolution=cfg.rss_resolution)
            ]
        if epoch.tdoa and len(uwb) >= 2:
            tdoa = [
                TdoaReading(r.anchor_id, r.ref_anchor_id, canonical(r.value), tdoa_sigma)
                for r in simulate_tdoa(pos, uwb, cfg.toa_sigma, tdoa_rng)
            ]
        if rss or tdoa:
            feed.append(MeasurementBatch(canonical(epoch.timestamp), rss, tdoa))
    return feed


def run_scenario(cfg: ScenarioConfig, mode: FilterMode = FilterMode.HYBRID) -> ScenarioResult:
    """
    Simulate the walk and its measurements, then filter the feed with the requested variant.
    The full feed is returned so other variants can be run on the same noise realization.
    """
    tick = 1.0 / max(cfg.rss_rate, cfg.tdoa_rate)
    truth = build_trajectory(cfg.waypoints, cfg.speed, tick, cfg.duration)
    feed = simulate_feed(cfg, truth)
    track = filter_feed(feed, cfg.filter_setup(), mode)
    Logger().debug(
        f"Scenario seed={cfg.seed}, mode={mode.value}: {len(feed)} batches, "
        f"{len(track) - 1} filter updates over {truth.path_length():.2f} m of path."
    )
    return ScenarioResult(truth=truth, track=track, feed=feed, mode=mode)
