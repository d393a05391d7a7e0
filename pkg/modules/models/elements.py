import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

import numpy as np

from modules.util.exceptions import UnknownAnchorError, ValidationError
from modules.util.logger import Logger

# Speed of light in vacuum (m/s)
SPEED_OF_LIGHT = 299_792_458.0

# Below this many anchors of one technology the position is not observable from that technology alone
_MIN_ANCHORS_FOR_FIX = 3


class Technology(Enum):
    BLE = "BLE"
    UWB = "UWB"


@dataclass(frozen=True)
class Anchor:
    """
    Fixed infrastructure node with a known 2D position. BLE anchors report received power,
    UWB anchors report reception times.
    """

    id: str
    x: float
    y: float
    tech: Technology

    def __post_init__(self):
        if not self.id:
            raise ValidationError("Anchor id cannot be empty.")
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValidationError(f"Anchor {self.id} has a non-finite position.")

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y])


@dataclass(frozen=True)
class PathLossParams:
    """Log-distance path-loss model: RSS(d) = rss0 - 10 * gamma * log10(d / d0)."""

    rss0: float = -40.0
    d0: float = 1.0
    gamma: float = 1.9

    def __post_init__(self):
        if not math.isfinite(self.rss0):
            raise ValidationError("rss0 must be finite.")
        if not self.d0 > 0:
            raise ValidationError("The reference distance d0 must be positive.")
        if not self.gamma > 0:
            raise ValidationError("The path-loss exponent gamma must be positive.")


@dataclass(frozen=True)
class DwnaParams:
    """Discrete white noise acceleration: sigma_a is the standard deviation of the acceleration (m/s^2)."""

    sigma_a: float = 2.0

    def __post_init__(self):
        if not (math.isfinite(self.sigma_a) and self.sigma_a >= 0):
            raise ValidationError("sigma_a must be a finite, non-negative number.")


class Deployment:
    """
    This class represents the anchor infrastructure of a localization system.
    """

    def __init__(self, anchors: Iterable[Anchor]):
        self._anchors = list(anchors)
        self._by_id: dict[str, Anchor] = {}
        for anchor in self._anchors:
            if anchor.id in self._by_id:
                raise ValidationError(f"Anchor ids must be unique, '{anchor.id}' appears twice.")
            self._by_id[anchor.id] = anchor

        self._ble = sorted((a for a in self._anchors if a.tech == Technology.BLE), key=lambda a: a.id)
        self._uwb = sorted((a for a in self._anchors if a.tech == Technology.UWB), key=lambda a: a.id)

    def check_observability(self):
        """
        Warn (but do not fail) when a technology has too few anchors to fix a 2D position on its own.
        """
        for tech, anchors in ((Technology.BLE, self._ble), (Technology.UWB, self._uwb)):
            if len(anchors) < _MIN_ANCHORS_FOR_FIX:
                Logger().warning(
                    f"Only {len(anchors)} {tech.value} anchor(s) deployed; "
                    f"at least {_MIN_ANCHORS_FOR_FIX} are needed for a {tech.value}-only position fix."
                )

    def get_anchor(self, anchor_id: str) -> Anchor:
        try:
            return self._by_id[anchor_id]
        except KeyError:
            raise UnknownAnchorError(anchor_id) from None

    def has_anchor(self, anchor_id: str) -> bool:
        return anchor_id in self._by_id

    def get_anchors(self) -> list[Anchor]:
        return list(self._anchors)

    def get_ble_anchors(self) -> list[Anchor]:
        return list(self._ble)

    def get_uwb_anchors(self) -> list[Anchor]:
        return list(self._uwb)

    def get_reference_anchor(self) -> Anchor:
        """
        TDOA values are formed against the first UWB anchor in id order.
        """
        if not self._uwb:
            raise ValidationError("The deployment has no UWB anchor to use as TDOA reference.")
        return self._uwb[0]

    def positions(self) -> np.ndarray:
        return np.array([[a.x, a.y] for a in self._anchors]).reshape(-1, 2)

    def centroid(self) -> np.ndarray:
        if not self._anchors:
            raise ValidationError("The deployment has no anchors.")
        return self.positions().mean(axis=0)

    def bounding_box_diagonal(self) -> float:
        if not self._anchors:
            raise ValidationError("The deployment has no anchors.")
        positions = self.positions()
        return float(np.linalg.norm(positions.max(axis=0) - positions.min(axis=0)))

    def __len__(self) -> int:
        return len(self._anchors)

    def __iter__(self):
        return iter(self._anchors)

    def __str__(self):
        return f"Deployment(ble={[a.id for a in self._ble]}, uwb={[a.id for a in self._uwb]})"

    def __repr__(self):
        return self.__str__()
