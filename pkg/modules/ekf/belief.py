import math
from dataclasses import dataclass

import numpy as np

from modules.models.elements import Deployment
from modules.models.kinematics import STATE_DIM
from modules.util.exceptions import InvalidStateError, ValidationError

# Largest tolerated asymmetry of a covariance matrix
SYMMETRY_TOLERANCE = 1e-9
# Most negative eigenvalue a covariance may have
PSD_TOLERANCE = 1e-9


@dataclass(frozen=True)
class FilterConfig:
    """
    Tuning of the filter that is not part of the motion or measurement models.
    """

    init_velocity_sigma: float = 2.0  # m/s
    position_sigma_floor: float = 5.0  # m
    correlated_tdoa: bool = False
    innovation_jitter: float = 0.0

    def __post_init__(self):
        if not self.init_velocity_sigma > 0:
            raise ValidationError("The initial velocity sigma must be positive.")
        if not self.position_sigma_floor > 0:
            raise ValidationError("The initial position sigma floor must be positive.")
        if not (math.isfinite(self.innovation_jitter) and self.innovation_jitter >= 0):
            raise ValidationError("The innovation jitter must be a finite, non-negative number.")


@dataclass(frozen=True, eq=False)
class Belief:
    """
    Gaussian belief over the tag state (x, y, vx, vy) at a given time.
    """

    state: np.ndarray
    cov: np.ndarray
    timestamp: float

    def __post_init__(self):
        state = np.array(self.state, dtype=float).reshape(-1)
        cov = np.array(self.cov, dtype=float)
        if state.shape != (STATE_DIM,) or cov.shape != (STATE_DIM, STATE_DIM):
            raise InvalidStateError(f"Belief must hold a {STATE_DIM}-vector and a {STATE_DIM}x{STATE_DIM} covariance.")
        if not (np.all(np.isfinite(state)) and np.all(np.isfinite(cov)) and math.isfinite(self.timestamp)):
            raise InvalidStateError(f"Belief at t={self.timestamp} contains non-finite values.")
        if np.max(np.abs(cov - cov.T)) > SYMMETRY_TOLERANCE:
            raise InvalidStateError(f"Belief covariance at t={self.timestamp} is not symmetric.")
        min_eig = float(np.linalg.eigvalsh(cov).min())
        if min_eig < -PSD_TOLERANCE:
            raise InvalidStateError(
                f"Belief covariance at t={self.timestamp} is not positive semi-definite (min eigenvalue {min_eig:.3g})."
            )

        # Values are shared between beliefs, never mutated
        state.flags.writeable = False
        cov.flags.writeable = False
        object.__setattr__(self, "state", state)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "timestamp", float(self.timestamp))

    @property
    def position(self) -> np.ndarray:
        return self.state[:2]

    @property
    def velocity(self) -> np.ndarray:
        return self.state[2:]

    def __repr__(self):
        return f"Belief(t={self.timestamp}, state={self.state.tolist()})"


def init_belief(anchors: Deployment, config: FilterConfig = FilterConfig(), timestamp: float = 0.0) -> Belief:
    """
    Uninformed starting belief: the tag is somewhere inside the deployment and at rest.

    The position is the anchor centroid with a standard deviation of half the bounding-box
    diagonal (never below the configured floor); the velocity is zero with the configured sigma.
    """
    if len(anchors) == 0:
        raise ValidationError("At least one anchor is required to initialise the filter.")

    sigma_p = max(anchors.bounding_box_diagonal() / 2.0, config.position_sigma_floor)
    sigma_v = config.init_velocity_sigma

    state = np.concatenate([anchors.centroid(), np.zeros(2)])
    cov = np.diag([sigma_p ** 2, sigma_p ** 2, sigma_v ** 2, sigma_v ** 2])
    return Belief(state=state, cov=cov, timestamp=timestamp)
