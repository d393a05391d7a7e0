"""
Noisy RSS and TDOA readings for a tag at a known position.
"""
import math
from typing import Optional, Sequence

import numpy as np

from modules.models.elements import SPEED_OF_LIGHT, Anchor, PathLossParams
from modules.models.measurements import RssReading, TdoaReading
from modules.models.propagation import rss_predict
from modules.util.exceptions import ValidationError

DEFAULT_RSS_SIGMA_DB = 3.0
DEFAULT_TOA_SIGMA_S = 0.2e-9


def default_tdoa_sigma(toa_sigma: float) -> float:
    """
    Standard deviation (m) of a range difference formed from two independent reception times.
    """
    return math.sqrt(2.0) * SPEED_OF_LIGHT * (toa_sigma if toa_sigma > 0 else DEFAULT_TOA_SIGMA_S)


def simulate_rss(
    pos: np.ndarray,
    anchors: Sequence[Anchor],
    pl: PathLossParams,
    shadow_sigma: float,
    rng: np.random.Generator,
    reading_sigma: Optional[float] = None,
    resolution: Optional[float] = None,
) -> list[RssReading]:
    """
    One reading per BLE anchor: the path-loss prediction plus independent Gaussian shadowing.
    With a resolution the reported power is rounded to that step, as receivers report
    power in whole dB.
    """
    if not shadow_sigma >= 0:
        raise ValidationError("The shadowing sigma must be non-negative.")
    sigma = reading_sigma if reading_sigma is not None else (shadow_sigma if shadow_sigma > 0 else DEFAULT_RSS_SIGMA_DB)

    shadowing = rng.normal(0.0, shadow_sigma, size=len(anchors))
    readings = []
    for anchor, noise in zip(anchors, shadowing):
        value = rss_predict(pos, anchor, pl) + float(noise)
        if resolution:
            value = resolution * round(value / resolution)
        readings.append(RssReading(anchor_id=anchor.id, value=value, sigma=sigma))
    return readings


def simulate_tdoa(
    pos: np.ndarray,
    anchors: Sequence[Anchor],
    toa_sigma: float,
    rng: np.random.Generator,
    reading_sigma: Optional[float] = None,
) -> list[TdoaReading]:
    """
    Range differences against the reference anchor (first UWB id) from noisy reception times.
    Every anchor's reception time carries its own error, so all readings share the
    reference anchor's error.
    """
    if len(anchors) < 2:
        raise ValidationError("At least two UWB anchors are needed to form a TDOA.")
    if not toa_sigma >= 0:
        raise ValidationError("The reception-time sigma must be non-negative.")
    sigma = reading_sigma if reading_sigma is not None else default_tdoa_sigma(toa_sigma)

    ordered = sorted(anchors, key=lambda a: a.id)
    pos = np.asarray(pos, dtype=float)[:2]
    # Reception times expressed as ranges (t * c) to stay in meters
    ranges = np.array([np.linalg.norm(pos - a.position) for a in ordered])
    ranges = ranges + SPEED_OF_LIGHT * rng.normal(0.0, toa_sigma, size=len(ordered))

    reference = ordered[0]
    return [
        TdoaReading(anchor_id=anchor.id, ref_anchor_id=reference.id, value=float(ranges[i] - ranges[0]), sigma=sigma)
        for i, anchor in enumerate(ordered)
        if i > 0
    ]
