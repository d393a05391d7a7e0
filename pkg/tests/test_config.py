import pytest

from modules.ekf.belief import FilterConfig
from modules.models.elements import SPEED_OF_LIGHT, DwnaParams, PathLossParams, Technology
from modules.util.exceptions import ParseError
from modules.yaml.decoder import decodeScenario, load_deployment, load_scenario_config

ANCHORS = """\
anchors:
  - {id: B1, x: 5, y: 0, tech: BLE}
  - {id: B2, x: 10, y: 5, tech: ble}
  - {id: B3, x: 5, y: 10, tech: BLE}
  - {id: U1, x: 0, y: 0, tech: UWB}
  - {id: U2, x: 10, y: 0, tech: UWB}
  - {id: U3, x: 10, y: 10, tech: UWB}
"""
WAYPOINTS = """\
waypoints:
  - [2, 2]
  - [8, 2]
  - [8, 8]
"""
MINIMAL = ANCHORS + WAYPOINTS


def test_minimal_file_uses_defaults():
    cfg = load_scenario_config(MINIMAL)
    assert cfg.speed == 1.4
    assert cfg.rss_rate == 10.0
    assert cfg.tdoa_rate == 0.5
    assert cfg.rss_shadow_sigma == 3.0
    assert cfg.toa_sigma == pytest.approx(0.2e-9)
    assert cfg.path_loss == PathLossParams(-40.0, 1.0, 1.9)
    assert cfg.dwna == DwnaParams(2.0)
    assert cfg.seed == 0
    assert cfg.duration is None
    assert cfg.rss_sigma is None
    assert cfg.filter == FilterConfig()
    assert cfg.waypoints == ((2.0, 2.0), (8.0, 2.0), (8.0, 8.0))


def test_anchors_are_parsed():
    cfg = load_scenario_config(MINIMAL)
    assert [a.id for a in cfg.anchors.get_ble_anchors()] == ["B1", "B2", "B3"]
    assert cfg.anchors.get_anchor("B2").tech == Technology.BLE
    assert cfg.anchors.get_anchor("U3").position.tolist() == [10.0, 10.0]


def test_reception_time_sigma_is_given_in_nanoseconds():
    cfg = load_scenario_config(MINIMAL + "toa_sigma_ns: 0.2\n")
    assert cfg.toa_sigma_m == pytest.approx(SPEED_OF_LIGHT * 0.2e-9)
    assert cfg.toa_sigma_m == pytest.approx(0.05996, abs=1e-5)


def test_options_override_defaults():
    cfg = load_scenario_config(
        MINIMAL + "tdoa_rate_hz: 2\nseed: 7\ngamma: 3.3\nrss0_dbm: -38\ncorrelated_tdoa: true\nduration_s: 12.5\n"
    )
    assert cfg.tdoa_rate == 2.0
    assert cfg.seed == 7
    assert cfg.path_loss == PathLossParams(-38.0, 1.0, 3.3)
    assert cfg.filter.correlated_tdoa
    assert cfg.duration == 12.5


def test_non_positive_rate_names_key_and_line():
    with pytest.raises(ParseError) as e:
        load_scenario_config(MINIMAL + "speed_mps: 1.4\ntdoa_rate_hz: 0\n")
    assert e.value.key_path == "tdoa_rate_hz"
    assert e.value.line == MINIMAL.count("\n") + 2


def test_unknown_key_is_rejected():
    with pytest.raises(ParseError) as e:
        load_scenario_config(MINIMAL + "tdoa_rate: 1\n")
    assert e.value.key_path == "tdoa_rate"
    assert e.value.line == MINIMAL.count("\n") + 1


def test_missing_waypoints_are_reported():
    with pytest.raises(ParseError) as e:
        load_scenario_config(ANCHORS)
    assert e.value.key_path == "waypoints"


def test_booleans_are_not_numbers():
    with pytest.raises(ParseError) as e:
        load_scenario_config(MINIMAL + "gamma: true\n")
    assert e.value.key_path == "gamma"


def test_negative_seed_is_rejected():
    with pytest.raises(ParseError):
        load_scenario_config(MINIMAL + "seed: -1\n")


def test_anchor_errors_point_at_the_anchor():
    text = ANCHORS.replace("{id: U2, x: 10, y: 0, tech: UWB}", "{id: U2, x: 10, y: 0}") + WAYPOINTS
    with pytest.raises(ParseError) as e:
        load_scenario_config(text)
    assert e.value.key_path == "anchors[4].tech"
    assert e.value.line == 6


def test_unknown_technology_is_rejected():
    text = ANCHORS.replace("tech: ble", "tech: wifi") + WAYPOINTS
    with pytest.raises(ParseError) as e:
        load_scenario_config(text)
    assert e.value.key_path == "anchors[1].tech"
    assert e.value.line == 3


def test_duplicate_anchor_ids_are_rejected():
    text = ANCHORS.replace("id: U3", "id: U2") + WAYPOINTS
    with pytest.raises(ParseError) as e:
        load_scenario_config(text)
    assert e.value.key_path == "anchors[5].id"


def test_repeated_waypoints_are_rejected():
    with pytest.raises(ParseError) as e:
        load_scenario_config(ANCHORS + "waypoints:\n  - [2, 2]\n  - [2, 2]\n")
    assert e.value.key_path == "waypoints[1]"


def test_invalid_yaml_reports_a_line():
    with pytest.raises(ParseError) as e:
        load_scenario_config(MINIMAL + "seed: [1, 2\n")
    assert e.value.line is not None


def test_empty_file_is_rejected():
    with pytest.raises(ParseError):
        load_scenario_config("")


def test_deployment_does_not_need_a_walk():
    setup = load_deployment(ANCHORS + "sigma_a: 1.5\n")
    assert len(setup.anchors) == 6
    assert setup.dwna == DwnaParams(1.5)


def test_deployment_accepts_a_full_scenario():
    setup = load_deployment(MINIMAL + "tdoa_rate_hz: 2\n")
    assert setup.anchors.get_reference_anchor().id == "U1"


def test_missing_file_is_a_parse_error(tmp_path):
    with pytest.raises(ParseError):
        decodeScenario(str(tmp_path / "missing.yaml"))


def test_scenario_file_on_disk(tmp_path):
    path = tmp_path / "room.yaml"
    path.write_text(MINIMAL + "seed: 3\n")
    assert decodeScenario(str(path)).seed == 3
