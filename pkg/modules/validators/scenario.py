import math
from typing import Any, Optional, Tuple

from modules.models.elements import Anchor, Technology

# Key -> (kind, default). Kinds: "positive", "non-negative", "number", "seed", "bool".
# A default of None means "derived when not given".
SCENARIO_KEYS: dict[str, Tuple[str, Any]] = {
    "speed_mps": ("positive", 1.4),
    "rss_rate_hz": ("positive", 10.0),
    "tdoa_rate_hz": ("positive", 0.5),
    "shadow_sigma_db": ("non-negative", 3.0),
    "toa_sigma_ns": ("non-negative", 0.2),
    "rss0_dbm": ("number", -40.0),
    "d0_m": ("positive", 1.0),
    "gamma": ("positive", 1.9),
    "sigma_a": ("non-negative", 2.0),
    "seed": ("seed", 0),
    "duration_s": ("positive", None),
    "rss_sigma_db": ("positive", None),
    "tdoa_sigma_m": ("positive", None),
    "correlated_tdoa": ("bool", False),
    "innovation_jitter": ("non-negative", 0.0),
    "rss_resolution_db": ("positive", None),
    "init_velocity_sigma_mps": ("positive", 2.0),
    "position_sigma_floor_m": ("positive", 5.0),
}

_STRUCTURE_KEYS = ["anchors", "waypoints"]
_ANCHOR_KEYS = ["id", "x", "y", "tech"]
_MAX_SEED = 2 ** 64 - 1


def _is_number(value: Any) -> bool:
    # YAML booleans are ints in Python, never accept them as numbers
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


def validate_configuration_structure(data: Any, require_waypoints: bool = True) -> Tuple[bool, str, str]:
    """
    Check the top level of a scenario file: a mapping with anchors (and waypoints) and no unknown keys.
    """
    if not isinstance(data, dict) or len(data) == 0:
        return False, "Input data should be a non-empty mapping.", ""
    for key in data:
        if key not in SCENARIO_KEYS and key not in _STRUCTURE_KEYS:
            return False, f"Unknown key '{key}'.", str(key)
    required = _STRUCTURE_KEYS if require_waypoints else ["anchors"]
    for key in required:
        if key not in data:
            return False, f"Missing required key '{key}'.", key
    return True, "", ""


def validate_value(key: str, value: Any) -> Tuple[bool, str]:
    kind, _ = SCENARIO_KEYS[key]
    if kind == "bool":
        if not isinstance(value, bool):
            return False, "Expected true or false."
        return True, ""
    if kind == "seed":
        if not isinstance(value, int) or isinstance(value, bool) or not 0 <= value <= _MAX_SEED:
            return False, "Expected an integer between 0 and 2^64-1."
        return True, ""
    if not _is_number(value):
        return False, "Expected a finite number."
    if kind == "positive" and value <= 0:
        return False, "Expected a positive number."
    if kind == "non-negative" and value < 0:
        return False, "Expected a non-negative number."
    return True, ""


def validate_anchor(data: Any) -> Tuple[Optional[Anchor], bool, str, str]:
    """
    Returns the parsed anchor, the status, the error message and the failing sub-key.
    """
    if not isinstance(data, dict):
        return None, False, "An anchor must be a mapping with id, x, y and tech.", ""
    for key in data:
        if key not in _ANCHOR_KEYS:
            return None, False, f"Unknown anchor key '{key}'.", str(key)
    for key in _ANCHOR_KEYS:
        if key not in data:
            return None, False, f"Missing anchor key '{key}'.", key

    anchor_id = data["id"]
    if isinstance(anchor_id, bool) or not isinstance(anchor_id, (str, int)) or str(anchor_id).strip() == "":
        return None, False, "The anchor id must be a non-empty string.", "id"
    for key in ("x", "y"):
        if not _is_number(data[key]):
            return None, False, "Expected a finite number.", key
    tech = str(data["tech"]).upper()
    if tech not in Technology.__members__:
        return None, False, f"The technology must be one of {', '.join(Technology.__members__)}.", "tech"

    return Anchor(str(anchor_id).strip(), float(data["x"]), float(data["y"]), Technology[tech]), True, "", ""


def validate_anchors(data: Any) -> Tuple[list[Anchor], bool, str, str]:
    if not isinstance(data, list) or len(data) == 0:
        return [], False, "Expected a non-empty list of anchors.", ""

    anchors, seen = [], set()
    for idx, raw in enumerate(data):
        anchor, status, msg, key = validate_anchor(raw)
        if not status or anchor is None:
            return [], False, msg, f"[{idx}]" + (f".{key}" if key else "")
        if anchor.id in seen:
            return [], False, f"Anchor ids must be unique, '{anchor.id}' appears twice.", f"[{idx}].id"
        seen.add(anchor.id)
        anchors.append(anchor)
    return anchors, True, "", ""


def validate_waypoints(data: Any) -> Tuple[list[tuple[float, float]], bool, str, str]:
    if not isinstance(data, list) or len(data) < 2:
        return [], False, "Expected a list of at least two [x, y] waypoints.", ""

    waypoints: list[tuple[float, float]] = []
    for idx, raw in enumerate(data):
        if not isinstance(raw, list) or len(raw) != 2 or not all(_is_number(v) for v in raw):
            return [], False, "A waypoint must be a list of two finite numbers [x, y].", f"[{idx}]"
        point = (float(raw[0]), float(raw[1]))
        if waypoints and waypoints[-1] == point:
            return [], False, "Consecutive waypoints must differ.", f"[{idx}]"
        waypoints.append(point)
    return waypoints, True, "", ""
