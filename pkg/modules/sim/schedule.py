import math
from dataclasses import dataclass

from modules.util.exceptions import ValidationError

# Epochs closer than this are the same instant (s)
_COINCIDENCE_RESOLUTION = 1e-9


@dataclass(frozen=True)
class Epoch:
    timestamp: float
    rss: bool
    tdoa: bool


def _event_count(rate: float, duration: float) -> int:
    return int(math.floor(duration * rate + 1e-9))


def schedule(rss_rate: float, tdoa_rate: float, duration: float) -> list[Epoch]:
    """
    Measurement epochs of the two independent streams: RSS at k / rss_rate and TDOA at
    k / tdoa_rate for k >= 1 up to the duration. Coincident epochs are merged.
    """
    for name, rate in (("RSS", rss_rate), ("TDOA", tdoa_rate)):
        if not (math.isfinite(rate) and rate > 0):
            raise ValidationError(f"The {name} rate must be positive, got {rate}.")
    if not (math.isfinite(duration) and duration >= 0):
        raise ValidationError("The schedule duration must be non-negative.")

    epochs: dict[int, Epoch] = {}
    for stream, rate in (("rss", rss_rate), ("tdoa", tdoa_rate)):
        for k in range(1, _event_count(rate, duration) + 1):
            t = k / rate
            key = round(t / _COINCIDENCE_RESOLUTION)
            current = epochs.get(key, Epoch(timestamp=t, rss=False, tdoa=False))
            if stream == "rss":
                epochs[key] = Epoch(current.timestamp, True, current.tdoa)
            else:
                epochs[key] = Epoch(current.timestamp, current.rss, True)

    return [epochs[key] for key in sorted(epochs)]
