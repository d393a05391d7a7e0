import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

from modules.util.exceptions import ValidationError


@dataclass(frozen=True)
class RssReading:
    anchor_id: str
    value: float  # dBm
    sigma: float  # dB

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValidationError(f"RSS reading of anchor {self.anchor_id} is not finite.")
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise ValidationError(f"RSS reading of anchor {self.anchor_id} needs a positive sigma.")


@dataclass(frozen=True)
class TdoaReading:
    anchor_id: str
    ref_anchor_id: str
    value: float  # range difference, m
    sigma: float  # m

    def __post_init__(self):
        if self.anchor_id == self.ref_anchor_id:
            raise ValidationError(f"TDOA reading pairs anchor {self.anchor_id} with itself.")
        if not math.isfinite(self.value):
            raise ValidationError(f"TDOA reading {self.anchor_id}-{self.ref_anchor_id} is not finite.")
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise ValidationError(f"TDOA reading {self.anchor_id}-{self.ref_anchor_id} needs a positive sigma.")


@dataclass(frozen=True)
class MeasurementBatch:
    """
    All readings that share one timestamp. The number of RSS and TDOA readings varies
    from batch to batch: most batches carry RSS only.
    """

    timestamp: float
    rss: tuple[RssReading, ...] = field(default_factory=tuple)
    tdoa: tuple[TdoaReading, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not math.isfinite(self.timestamp):
            raise ValidationError("Batch timestamp must be finite.")
        # Accept any iterable, store tuples
        object.__setattr__(self, "rss", tuple(self.rss))
        object.__setattr__(self, "tdoa", tuple(self.tdoa))

    def __len__(self) -> int:
        return len(self.rss) + len(self.tdoa)

    def is_empty(self) -> bool:
        return len(self) == 0


class FilterMode(Enum):
    HYBRID = "hybrid"
    RSS = "rss"
    TDOA = "tdoa"


def project_feed(feed: Iterable[MeasurementBatch], mode: FilterMode) -> list[MeasurementBatch]:
    """
    Restrict a feed to the readings used by the given filter variant. Batches left
    without any reading are dropped, so every variant sees the same noise realization.
    """
    projected = []
    for batch in feed:
        rss = batch.rss if mode != FilterMode.TDOA else ()
        tdoa = batch.tdoa if mode != FilterMode.RSS else ()
        if rss or tdoa:
            projected.append(MeasurementBatch(batch.timestamp, rss, tdoa))
    return projected


def check_anchor_ids(feed: Iterable[MeasurementBatch], anchors) -> None:
    """
    Ensure every anchor referenced by the feed exists in the deployment.
    """
    for batch in feed:
        for reading in batch.rss:
            anchors.get_anchor(reading.anchor_id)
        for reading in batch.tdoa:
            anchors.get_anchor(reading.anchor_id)
            anchors.get_anchor(reading.ref_anchor_id)
