from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from modules.metrics.statistics import CdfCurve, Summary, empirical_cdf, summarize
from modules.metrics.trajectory import trajectory_error_series
from modules.models.measurements import FilterMode
from modules.sim.scenario import ScenarioConfig, run_scenario
from modules.util.exceptions import ValidationError
from modules.util.logger import Logger


@dataclass(frozen=True)
class SweepSpec:
    tdoa_rates: tuple[float, ...]
    runs: int
    base: ScenarioConfig
    out_dir: Optional[str] = None

    def __post_init__(self):
        if self.runs < 1:
            raise ValidationError("A sweep needs at least one run per rate.")
        if len(self.tdoa_rates) == 0 or any(not rate > 0 for rate in self.tdoa_rates):
            raise ValidationError("Sweep TDOA rates must be positive.")


@dataclass(frozen=True, eq=False)
class SweepLine:
    """
    Results of one filter variant over all runs: per-run summaries and the pooled CDF.
    """

    rate: Optional[float]  # None for the RSS-only baseline
    summaries: list[Summary]
    cdf: CdfCurve

    def mean_median(self) -> float:
        return float(np.mean([s.median for s in self.summaries]))

    def mean_p90(self) -> float:
        return float(np.mean([s.p90 for s in self.summaries]))

    def pooled_median(self) -> float:
        """Median of the errors of all runs taken together, read off the pooled CDF."""
        return self.cdf.quantile(0.5)


@dataclass(frozen=True, eq=False)
class SweepResult:
    baseline: SweepLine
    lines: list[SweepLine]


def run_errors(job: tuple[ScenarioConfig, FilterMode]) -> np.ndarray:
    """
    Trajectory errors of one run. Module level so process pools can pickle it.
    """
    cfg, mode = job
    result = run_scenario(cfg, mode)
    return trajectory_error_series(result.track, result.truth.get_polyline()).errors


def run_sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """
    Run every (rate, run) scenario plus an RSS-only baseline per run. Run i of every rate uses
    seed + i, and RSS noise does not depend on the TDOA rate, so all variants of one run share
    the same RSS noise. Results are gathered in submission order, so the number of workers
    never changes the output.
    """
    if workers < 1:
        raise ValidationError("At least one worker is required.")

    seeds = [spec.base.seed + run for run in range(spec.runs)]
    jobs = [(replace(spec.base, seed=seed), FilterMode.RSS) for seed in seeds]
    for rate in spec.tdoa_rates:
        jobs.extend((replace(spec.base, seed=seed, tdoa_rate=rate), FilterMode.HYBRID) for seed in seeds)

    Logger().info(f"Running {len(jobs)} scenario(s) with {workers} worker(s)...")
    if workers == 1:
        errors = [run_errors(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            errors = list(pool.map(run_errors, jobs))

    def line(rate: Optional[float], chunk: list[np.ndarray]) -> SweepLine:
        return SweepLine(rate=rate, summaries=[summarize(e) for e in chunk], cdf=empirical_cdf(np.concatenate(chunk)))

    n = spec.runs
    baseline = line(None, errors[:n])
    lines = [line(rate, errors[(i + 1) * n:(i + 2) * n]) for i, rate in enumerate(spec.tdoa_rates)]
    return SweepResult(baseline=baseline, lines=lines)
