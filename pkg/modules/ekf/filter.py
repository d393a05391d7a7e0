from dataclasses import dataclass, replace
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np
import scipy.linalg

from modules.ekf.belief import Belief, FilterConfig, init_belief
from modules.models.elements import Deployment, DwnaParams, PathLossParams
from modules.models.kinematics import STATE_DIM, dwna_model
from modules.models.measurements import FilterMode, MeasurementBatch, project_feed
from modules.models.propagation import rss_jacobian_row, rss_predict, tdoa_jacobian_row, tdoa_predict
from modules.util.exceptions import NumericalFailureError, OrderingError, ValidationError
from modules.util.logger import Logger


@dataclass(frozen=True, eq=False)
class MeasurementSystem:
    """
    Stacked measurement vector z, its prediction h, the linearization H and the noise covariance R.
    """

    z: np.ndarray
    h: np.ndarray
    H: np.ndarray
    R: np.ndarray

    def __post_init__(self):
        m = len(self.z)
        if self.h.shape != (m,) or self.H.shape != (m, STATE_DIM) or self.R.shape != (m, m):
            raise ValidationError("Inconsistent measurement system dimensions.")

    def __len__(self) -> int:
        return len(self.z)


class Track:
    """
    Time-ordered list of beliefs produced by the filter, starting with the initial belief.
    """

    def __init__(self, beliefs: Sequence[Belief]):
        if len(beliefs) == 0:
            raise ValidationError("A track holds at least one belief.")
        self._beliefs = list(beliefs)

    def get_beliefs(self) -> list[Belief]:
        return list(self._beliefs)

    def get_initial(self) -> Belief:
        return self._beliefs[0]

    def get_final(self) -> Belief:
        return self._beliefs[-1]

    def timestamps(self) -> np.ndarray:
        return np.array([b.timestamp for b in self._beliefs])

    def positions(self) -> np.ndarray:
        return np.array([b.position for b in self._beliefs])

    def __len__(self) -> int:
        return len(self._beliefs)

    def __iter__(self) -> Iterator[Belief]:
        return iter(self._beliefs)

    def __getitem__(self, idx: int) -> Belief:
        return self._beliefs[idx]


def predict(b: Belief, dt: float, dp: DwnaParams) -> Belief:
    """
    Time update: propagate the belief dt seconds ahead with the constant-velocity model.
    """
    model = dwna_model(dt, dp)
    cov = model.f @ b.cov @ model.f.T + model.q
    return Belief(state=model.f @ b.state, cov=(cov + cov.T) / 2.0, timestamp=b.timestamp + model.dt)


def assemble(
    b: Belief,
    batch: MeasurementBatch,
    anchors: Deployment,
    pl: PathLossParams,
    correlated_tdoa: bool = False,
) -> MeasurementSystem:
    """
    Build the measurement system of one batch linearized at the belief: RSS rows first,
    then TDOA rows, each in batch order.
    """
    if batch.is_empty():
        raise ValidationError(f"Cannot update with an empty batch (t={batch.timestamp}).")

    pos = b.position
    z, h, rows, sigmas = [], [], [], []

    for reading in batch.rss:
        anchor = anchors.get_anchor(reading.anchor_id)
        z.append(reading.value)
        h.append(rss_predict(pos, anchor, pl, clamp=True))
        rows.append(rss_jacobian_row(pos, anchor, pl, clamp=True))
        sigmas.append(reading.sigma)

    for reading in batch.tdoa:
        anchor_m = anchors.get_anchor(reading.anchor_id)
        anchor_ref = anchors.get_anchor(reading.ref_anchor_id)
        z.append(reading.value)
        h.append(tdoa_predict(pos, anchor_m, anchor_ref))
        rows.append(tdoa_jacobian_row(pos, anchor_m, anchor_ref, clamp=True))
        sigmas.append(reading.sigma)

    sigmas = np.array(sigmas)
    R = np.diag(sigmas ** 2)
    if correlated_tdoa:
        # TDOAs sharing a reference anchor share that anchor's reception-time error
        offset = len(batch.rss)
        for i, a in enumerate(batch.tdoa):
            for j, other in enumerate(batch.tdoa):
                if i != j and a.ref_anchor_id == other.ref_anchor_id:
                    R[offset + i, offset + j] = sigmas[offset + i] * sigmas[offset + j] / 2.0

    return MeasurementSystem(z=np.array(z), h=np.array(h), H=np.array(rows), R=R)


def correct(b: Belief, system: MeasurementSystem, jitter: float = 0.0) -> tuple[Belief, np.ndarray]:
    """
    Measurement update of the belief with an assembled system.

    Returns the posterior belief and the innovation z - h. The innovation covariance is
    factorized with a Cholesky decomposition; a failure is raised, never regularized
    silently (an explicit jitter can be added to its diagonal).
    """
    P = b.cov
    H = system.H
    PHt = P @ H.T
    S = H @ PHt + system.R
    if jitter > 0:
        S = S + jitter * np.eye(len(system))

    try:
        factor = scipy.linalg.cho_factor(S, lower=True)
    except (np.linalg.LinAlgError, ValueError):
        raise NumericalFailureError(f"Innovation covariance at t={b.timestamp} is not positive definite", S) from None

    # K = P H^T S^-1, solved as S K^T = H P
    K = scipy.linalg.cho_solve(factor, PHt.T).T
    innovation = system.z - system.h

    state = b.state + K @ innovation
    cov = (np.eye(STATE_DIM) - K @ H) @ P
    posterior = Belief(state=state, cov=(cov + cov.T) / 2.0, timestamp=b.timestamp)
    return posterior, innovation


def update(
    b: Belief,
    batch: MeasurementBatch,
    anchors: Deployment,
    pl: PathLossParams,
    config: FilterConfig = FilterConfig(),
) -> Belief:
    system = assemble(b, batch, anchors, pl, correlated_tdoa=config.correlated_tdoa)
    posterior, innovation = correct(b, system, jitter=config.innovation_jitter)
    Logger().debug(
        f"t={batch.timestamp}: {len(batch.rss)} RSS + {len(batch.tdoa)} TDOA, "
        f"|innovation|={np.linalg.norm(innovation):.4g}"
    )
    return posterior


def feed_start(feed: Sequence[MeasurementBatch]) -> float:
    """
    Time at which a filter over this feed starts: the first batch timestamp (0 for an empty feed).
    """
    return feed[0].timestamp if len(feed) > 0 else 0.0


def run_filter(
    feed: Iterable[MeasurementBatch],
    anchors: Deployment,
    pl: PathLossParams,
    dp: DwnaParams,
    init: Belief,
    config: Optional[FilterConfig] = None,
) -> Track:
    """
    Run the filter over a time-ordered feed, emitting the initial belief followed by one
    posterior belief per batch.
    """
    config = config or FilterConfig()
    belief = init
    beliefs = [init]

    for idx, batch in enumerate(feed):
        if batch.timestamp < belief.timestamp:
            raise OrderingError(
                f"Measurement batch is older than the previous one (t={belief.timestamp})",
                timestamp=batch.timestamp,
                index=idx,
            )
        belief = predict(belief, batch.timestamp - belief.timestamp, dp)
        belief = update(belief, batch, anchors, pl, config)
        # Pin the timestamp to the batch time instead of the accumulated sum of steps
        belief = replace(belief, timestamp=batch.timestamp)
        beliefs.append(belief)

    Logger().debug(f"Filter processed {len(beliefs) - 1} measurement batch(es).")
    return Track(beliefs)


@dataclass(frozen=True)
class FilterSetup:
    """
    Everything needed to filter a feed: anchors, models and tuning.
    """

    anchors: Deployment
    path_loss: PathLossParams = PathLossParams()
    dwna: DwnaParams = DwnaParams()
    config: FilterConfig = FilterConfig()


def filter_feed(feed: Sequence[MeasurementBatch], setup: FilterSetup, mode: FilterMode = FilterMode.HYBRID) -> Track:
    """
    Run one filter variant over a feed. The variant only sees its projection of the feed and
    starts from the uninformed belief at the first batch it receives.
    """
    projected = project_feed(feed, mode)
    init = init_belief(setup.anchors, setup.config, timestamp=feed_start(projected))
    return run_filter(projected, setup.anchors, setup.path_loss, setup.dwna, init, setup.config)
