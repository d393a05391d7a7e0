import math
from dataclasses import dataclass

import numpy as np

from modules.models.elements import DwnaParams
from modules.util.exceptions import ValidationError

# State order: (x, y, vx, vy)
STATE_DIM = 4


@dataclass(frozen=True)
class StateTransition:
    f: np.ndarray
    q: np.ndarray
    dt: float


def _check_dt(dt: float):
    if not math.isfinite(dt) or dt < 0:
        raise ValidationError(f"The time step must be finite and non-negative, got {dt}.")


def dwna_transition(dt: float) -> np.ndarray:
    """
    Constant-velocity state transition matrix for the time step dt.
    """
    _check_dt(dt)
    f = np.eye(STATE_DIM)
    f[0, 2] = dt
    f[1, 3] = dt
    return f


def dwna_process_noise(dt: float, params: DwnaParams) -> np.ndarray:
    """
    Process noise of the discrete white noise acceleration model. The acceleration is
    piecewise constant over dt and enters each axis through gamma = [dt^2 / 2, dt].
    Axes are independent, so there is no x-y coupling.
    """
    _check_dt(dt)
    gamma = np.array([dt * dt / 2.0, dt])
    axis = params.sigma_a ** 2 * np.outer(gamma, gamma)

    q = np.zeros((STATE_DIM, STATE_DIM))
    for pos, vel in ((0, 2), (1, 3)):
        q[pos, pos] = axis[0, 0]
        q[pos, vel] = axis[0, 1]
        q[vel, pos] = axis[1, 0]
        q[vel, vel] = axis[1, 1]
    return q


def dwna_model(dt: float, params: DwnaParams) -> StateTransition:
    return StateTransition(f=dwna_transition(dt), q=dwna_process_noise(dt, params), dt=dt)
