from typing import Any, Optional

import yaml

from modules.ekf.belief import FilterConfig
from modules.ekf.filter import FilterSetup
from modules.models.elements import Deployment, DwnaParams, PathLossParams
from modules.sim.scenario import ScenarioConfig
from modules.util.exceptions import ParseError, ValidationError
from modules.validators.scenario import (
    SCENARIO_KEYS,
    validate_anchors,
    validate_configuration_structure,
    validate_value,
    validate_waypoints,
)

_NS_TO_S = 1e-9


def _line_index(node: yaml.Node, path: str = "") -> dict[str, int]:
    """
    Map every key path of a composed YAML document ("anchors[1].x") to its 1-based source line.
    """
    lines = {path: node.start_mark.line + 1}
    if isinstance(node, yaml.MappingNode):
        for key_node, value_node in node.value:
            child = f"{path}.{key_node.value}" if path else str(key_node.value)
            lines.update(_line_index(value_node, child))
            lines[child] = key_node.start_mark.line + 1
    elif isinstance(node, yaml.SequenceNode):
        for idx, item in enumerate(node.value):
            lines.update(_line_index(item, f"{path}[{idx}]"))
    return lines


class _Document:
    def __init__(self, text: str):
        try:
            node = yaml.compose(text, Loader=yaml.SafeLoader)
            self.data = yaml.safe_load(text)
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            raise ParseError(f"Error while parsing the YAML file: {getattr(e, 'problem', e)}",
                             line=mark.line + 1 if mark else None) from None
        if node is None or not self.data:
            raise ParseError("Empty YAML file provided.")
        self._lines = _line_index(node)

    def fail(self, message: str, key_path: str):
        # Fall back to the closest enclosing key that has a known line
        path = key_path
        while path not in self._lines:
            if "." in path:
                path = path.rsplit(".", 1)[0]
            else:
                path = path.rsplit("[", 1)[0] if "[" in path else ""
        raise ParseError(message, key_path=key_path or None, line=self._lines.get(path))


def _read_options(doc: _Document) -> dict[str, Any]:
    options = {}
    for key, (_, default) in SCENARIO_KEYS.items():
        if key not in doc.data:
            options[key] = default
            continue
        status, msg = validate_value(key, doc.data[key])
        if not status:
            doc.fail(msg, key)
        options[key] = doc.data[key]
    return options


def _read_deployment(doc: _Document) -> Deployment:
    anchors, status, msg, key = validate_anchors(doc.data["anchors"])
    if not status:
        doc.fail(msg, f"anchors{key}")
    deployment = Deployment(anchors)
    deployment.check_observability()
    return deployment


def _filter_config(options: dict[str, Any]) -> FilterConfig:
    return FilterConfig(
        init_velocity_sigma=float(options["init_velocity_sigma_mps"]),
        position_sigma_floor=float(options["position_sigma_floor_m"]),
        correlated_tdoa=bool(options["correlated_tdoa"]),
        innovation_jitter=float(options["innovation_jitter"]),
    )


def _optional_float(value: Optional[Any]) -> Optional[float]:
    return None if value is None else float(value)


def load_scenario_config(text: str) -> ScenarioConfig:
    """
    Parse and validate a scenario file, filling in the documented defaults.

    Raises:
    ParseError: with the offending key path and line when the file breaks the schema.
    """
    doc = _Document(text)
    status, msg, key = validate_configuration_structure(doc.data)
    if not status:
        doc.fail(msg, key)

    deployment = _read_deployment(doc)
    waypoints, status, msg, key = validate_waypoints(doc.data["waypoints"])
    if not status:
        doc.fail(msg, f"waypoints{key}")
    options = _read_options(doc)

    try:
        return ScenarioConfig(
            anchors=deployment,
            waypoints=tuple(waypoints),
            speed=float(options["speed_mps"]),
            rss_rate=float(options["rss_rate_hz"]),
            tdoa_rate=float(options["tdoa_rate_hz"]),
            rss_shadow_sigma=float(options["shadow_sigma_db"]),
            toa_sigma=float(options["toa_sigma_ns"]) * _NS_TO_S,
            path_loss=PathLossParams(float(options["rss0_dbm"]), float(options["d0_m"]), float(options["gamma"])),
            dwna=DwnaParams(float(options["sigma_a"])),
            duration=_optional_float(options["duration_s"]),
            seed=int(options["seed"]),
            rss_sigma=_optional_float(options["rss_sigma_db"]),
            tdoa_sigma=_optional_float(options["tdoa_sigma_m"]),
            rss_resolution=_optional_float(options["rss_resolution_db"]),
            filter=_filter_config(options),
        )
    except ValidationError as e:
        raise ParseError(f"Invalid scenario: {e}") from None


def load_deployment(text: str) -> FilterSetup:
    """
    Parse the anchors, models and filter tuning of a scenario file. Trajectory and noise keys are
    validated but not used, so the file of a simulation can be reused to replay its log.
    """
    doc = _Document(text)
    status, msg, key = validate_configuration_structure(doc.data, require_waypoints=False)
    if not status:
        doc.fail(msg, key)

    deployment = _read_deployment(doc)
    if "waypoints" in doc.data:
        _, status, msg, key = validate_waypoints(doc.data["waypoints"])
        if not status:
            doc.fail(msg, f"waypoints{key}")
    options = _read_options(doc)

    try:
        return FilterSetup(
            anchors=deployment,
            path_loss=PathLossParams(float(options["rss0_dbm"]), float(options["d0_m"]), float(options["gamma"])),
            dwna=DwnaParams(float(options["sigma_a"])),
            config=_filter_config(options),
        )
    except ValidationError as e:
        raise ParseError(f"Invalid deployment: {e}") from None


def _read_text(file_path: str) -> str:
    try:
        with open(file_path, "r") as file:
            return file.read()
    except OSError as e:
        raise ParseError(f"Cannot read {file_path}: {e.strerror or e}") from None


def decodeScenario(file_path: str) -> ScenarioConfig:
    """
    Read, parse and validate the YAML file describing a simulation scenario.
    """
    return load_scenario_config(_read_text(file_path))


def decodeDeployment(file_path: str) -> FilterSetup:
    """
    Read, parse and validate the YAML file describing the anchors used to replay a measurement log.
    """
    return load_deployment(_read_text(file_path))
