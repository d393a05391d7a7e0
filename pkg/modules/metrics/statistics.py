from dataclasses import dataclass
from typing import Sequence

import numpy as np

from modules.util.exceptions import ValidationError


def _as_errors(errors: Sequence[float]) -> np.ndarray:
    values = np.asarray(errors, dtype=float).reshape(-1)
    if values.size == 0:
        raise ValidationError("At least one error value is required.")
    if not np.all(np.isfinite(values)):
        raise ValidationError("Error values must be finite.")
    return values


@dataclass(frozen=True, eq=False)
class CdfCurve:
    """
    Step empirical CDF: the fraction of values not exceeding each distinct value.
    """

    errors: np.ndarray
    fractions: np.ndarray

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.errors.tolist(), self.fractions.tolist()))

    def at(self, x: float) -> float:
        idx = int(np.searchsorted(self.errors, x, side="right"))
        return 0.0 if idx == 0 else float(self.fractions[idx - 1])

    def quantile(self, p: float) -> float:
        """Smallest value whose cumulative fraction reaches p."""
        if not 0 < p <= 1:
            raise ValidationError("The quantile fraction must lie in (0, 1].")
        idx = int(np.searchsorted(self.fractions, p - 1e-12, side="left"))
        return float(self.errors[min(idx, len(self.errors) - 1)])

    def __len__(self) -> int:
        return len(self.errors)


def empirical_cdf(errors: Sequence[float]) -> CdfCurve:
    values = np.sort(_as_errors(errors))
    n = len(values)
    fractions = np.arange(1, n + 1) / n

    # Keep the last occurrence of every distinct value so ties form a single step
    last = np.append(values[1:] != values[:-1], True)
    return CdfCurve(errors=values[last], fractions=fractions[last])


@dataclass(frozen=True)
class Summary:
    median: float
    mean: float
    p90: float
    max: float
    count: int

    def rows(self) -> list[tuple[str, float]]:
        return [
            ("median_m", self.median),
            ("mean_m", self.mean),
            ("p90_m", self.p90),
            ("max_m", self.max),
            ("count", self.count),
        ]


def summarize(errors: Sequence[float]) -> Summary:
    """
    Summary statistics in meters. Quantiles use the lower value on ties between two samples,
    so the median of an even count is the lower middle value.
    """
    values = _as_errors(errors)
    return Summary(
        median=float(np.quantile(values, 0.5, method="lower")),
        mean=float(np.mean(values)),
        p90=float(np.quantile(values, 0.9, method="lower")),
        max=float(np.max(values)),
        count=int(values.size),
    )
