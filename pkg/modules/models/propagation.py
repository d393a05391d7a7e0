"""
Measurement functions of the filter and their analytic Jacobian rows.

All functions work on a 2D position; the Jacobian rows are 4-vectors over the state
(x, y, vx, vy) with zero velocity entries since neither RSS nor TDOA depends on velocity.
"""
import math

import numpy as np

from modules.models.elements import SPEED_OF_LIGHT, Anchor, PathLossParams, Technology
from modules.util.exceptions import DegenerateGeometryError, ValidationError

# Distances below this value are treated as coincident with the anchor (m)
GEOMETRY_EPSILON = 1e-6

_DB_PER_NEPER = 10.0 / math.log(10.0)


def _offset(pos: np.ndarray, anchor: Anchor, clamp: bool) -> tuple[np.ndarray, float]:
    delta = np.asarray(pos, dtype=float)[:2] - anchor.position
    d = float(math.hypot(delta[0], delta[1]))
    if d < GEOMETRY_EPSILON:
        if not clamp:
            raise DegenerateGeometryError(
                f"Position ({delta[0] + anchor.x}, {delta[1] + anchor.y}) coincides with anchor {anchor.id}."
            )
        d = GEOMETRY_EPSILON
    return delta, d


def rss_predict(pos: np.ndarray, anchor: Anchor, pl: PathLossParams, clamp: bool = False) -> float:
    """
    Received power (dBm) expected at the anchor for a tag at pos.
    """
    _, d = _offset(pos, anchor, clamp)
    return pl.rss0 - 10.0 * pl.gamma * math.log10(d / pl.d0)


def rss_jacobian_row(pos: np.ndarray, anchor: Anchor, pl: PathLossParams, clamp: bool = False) -> np.ndarray:
    delta, d = _offset(pos, anchor, clamp)
    row = np.zeros(4)
    row[:2] = -pl.gamma * _DB_PER_NEPER * delta / (d * d)
    return row


def _check_pair(anchor_m: Anchor, anchor_ref: Anchor):
    if anchor_m.id == anchor_ref.id:
        raise ValidationError(f"A TDOA pair needs two distinct anchors, got {anchor_m.id} twice.")
    for anchor in (anchor_m, anchor_ref):
        if anchor.tech != Technology.UWB:
            raise ValidationError(f"Anchor {anchor.id} is not a UWB anchor and cannot take part in a TDOA pair.")


def tdoa_predict(pos: np.ndarray, anchor_m: Anchor, anchor_ref: Anchor) -> float:
    """
    Range difference (m) between the tag-to-anchor_m and tag-to-anchor_ref distances.
    """
    _check_pair(anchor_m, anchor_ref)
    pos = np.asarray(pos, dtype=float)[:2]
    d_m = float(np.linalg.norm(pos - anchor_m.position))
    d_ref = float(np.linalg.norm(pos - anchor_ref.position))
    return d_m - d_ref


def tdoa_predict_seconds(pos: np.ndarray, anchor_m: Anchor, anchor_ref: Anchor) -> float:
    return tdoa_predict(pos, anchor_m, anchor_ref) / SPEED_OF_LIGHT


def tdoa_jacobian_row(pos: np.ndarray, anchor_m: Anchor, anchor_ref: Anchor, clamp: bool = False) -> np.ndarray:
    _check_pair(anchor_m, anchor_ref)
    delta_m, d_m = _offset(pos, anchor_m, clamp)
    delta_ref, d_ref = _offset(pos, anchor_ref, clamp)
    row = np.zeros(4)
    row[:2] = delta_m / d_m - delta_ref / d_ref
    return row
