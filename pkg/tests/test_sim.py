import math
from dataclasses import replace

import numpy as np
import pytest

from modules.ekf.filter import feed_start, run_filter
from modules.ekf.belief import init_belief
from modules.io.logs import write_measurement_log
from modules.io.outputs import write_track
from modules.metrics.statistics import summarize
from modules.metrics.trajectory import point_to_polyline
from modules.models.elements import SPEED_OF_LIGHT, Anchor, PathLossParams, Technology
from modules.models.measurements import FilterMode, MeasurementBatch, project_feed
from modules.sim.scenario import ScenarioConfig, default_scenario, run_scenario
from modules.sim.schedule import schedule
from modules.sim.sensors import default_tdoa_sigma, simulate_rss, simulate_tdoa
from modules.sim.sweep import SweepSpec, run_errors, run_sweep
from modules.sim.trajectory import build_trajectory
from modules.util.exceptions import ValidationError

PL = PathLossParams()
U1 = Anchor("U1", 0.0, 0.0, Technology.UWB)
U2 = Anchor("U2", 10.0, 0.0, Technology.UWB)
U3 = Anchor("U3", 10.0, 10.0, Technology.UWB)


def _short(cfg: ScenarioConfig, duration: float = 6.0, **changes) -> ScenarioConfig:
    return replace(cfg, duration=duration, **changes)


# Ground truth


def test_walk_along_a_straight_segment():
    truth = build_trajectory([(0.0, 0.0), (10.0, 0.0)], speed=1.4, tick=1.0)
    sample = truth.get_samples()[1]
    assert sample.t == 1.0
    assert sample.position == pytest.approx((1.4, 0.0))
    assert sample.velocity == pytest.approx((1.4, 0.0))


def test_path_duration():
    truth = build_trajectory([(0.0, 0.0), (10.0, 0.0), (10.0, 4.0)], speed=1.4, tick=0.5)
    assert truth.path_length() == pytest.approx(14.0)
    assert truth.path_duration() == pytest.approx(10.0)
    assert truth.get_samples()[-1].t == pytest.approx(10.0)


def test_direction_changes_at_the_corner():
    truth = build_trajectory([(0.0, 0.0), (10.0, 0.0), (10.0, 10.0)], speed=1.4, tick=0.1)
    corner = 10.0 / 1.4
    np.testing.assert_allclose(truth.velocity_at(corner - 0.01), [1.4, 0.0])
    np.testing.assert_allclose(truth.velocity_at(corner + 0.01), [0.0, 1.4], atol=1e-12)
    np.testing.assert_allclose(truth.position_at(corner + 1.0), [10.0, 1.4], atol=1e-12)


def test_tag_rests_on_the_last_waypoint():
    truth = build_trajectory([(0.0, 0.0), (2.0, 0.0)], speed=1.0, tick=1.0, duration=5.0)
    last = truth.get_samples()[-1]
    assert last.t == 5.0
    assert last.position == (2.0, 0.0)
    assert last.velocity == (0.0, 0.0)


def test_samples_lie_on_the_polyline():
    waypoints = [(2.0, 2.0), (8.0, 2.0), (8.0, 8.0), (2.0, 8.0), (2.0, 2.0)]
    truth = build_trajectory(waypoints, speed=1.4, tick=0.1)
    for sample in truth.get_samples():
        assert point_to_polyline(sample.position, waypoints) < 1e-12


@pytest.mark.parametrize(
    "waypoints, speed, tick",
    [
        ([(0.0, 0.0)], 1.0, 0.1),
        ([(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)], 1.0, 0.1),
        ([(0.0, 0.0), (1.0, 0.0)], 0.0, 0.1),
        ([(0.0, 0.0), (1.0, 0.0)], 1.0, 0.0),
    ],
)
def test_invalid_trajectories_are_rejected(waypoints, speed, tick):
    with pytest.raises(ValidationError):
        build_trajectory(waypoints, speed, tick)


# Sensors


def test_noiseless_rss_at_reference_distance():
    rng = np.random.default_rng(0)
    reading = simulate_rss(np.array([1.0, 0.0]), [Anchor("B1", 0.0, 0.0, Technology.BLE)], PL, 0.0, rng)[0]
    assert reading.value == -40.0
    assert reading.anchor_id == "B1"


def test_rss_shadowing_statistics():
    rng = np.random.default_rng(42)
    anchor = [Anchor("B1", 0.0, 0.0, Technology.BLE)]
    pos = np.array([10.0, 0.0])
    values = np.array([simulate_rss(pos, anchor, PL, 3.0, rng)[0].value for _ in range(100_000)]) + 59.0
    assert abs(values.mean()) < 0.05
    assert 2.97 <= values.std() <= 3.03


def test_rss_resolution_rounds_readings():
    rng = np.random.default_rng(1)
    readings = simulate_rss(np.array([3.0, 4.0]), [Anchor("B1", 0.0, 0.0, Technology.BLE)], PL, 3.0, rng, resolution=1.0)
    assert readings[0].value == round(readings[0].value)


def test_noiseless_tdoa_is_zero_for_equidistant_anchors():
    rng = np.random.default_rng(0)
    readings = simulate_tdoa(np.array([5.0, 3.0]), [U2, U1], 0.0, rng, reading_sigma=0.1)
    assert len(readings) == 1
    assert readings[0].anchor_id == "U2"
    assert readings[0].ref_anchor_id == "U1"
    assert readings[0].value == 0.0


def test_tdoa_noise_statistics():
    rng = np.random.default_rng(42)
    # Equidistant from all anchors: the readings are pure noise
    pos = np.array([5.0, 5.0])
    noise = np.array([[r.value for r in simulate_tdoa(pos, [U1, U2, U3], 0.2e-9, rng)] for _ in range(100_000)])
    assert noise[:, 0].std() == pytest.approx(math.sqrt(2.0) * SPEED_OF_LIGHT * 0.2e-9, rel=0.02)
    # Readings share the reference anchor's error
    assert np.cov(noise.T)[0, 1] == pytest.approx((SPEED_OF_LIGHT * 0.2e-9) ** 2, rel=0.05)


def test_default_tdoa_sigma():
    assert default_tdoa_sigma(0.2e-9) == pytest.approx(0.0848, abs=1e-4)


def test_tdoa_needs_two_anchors():
    with pytest.raises(ValidationError):
        simulate_tdoa(np.array([1.0, 1.0]), [U1], 0.2e-9, np.random.default_rng(0))


# Schedule


def test_schedule_counts():
    epochs = schedule(10.0, 0.5, 10.0)
    assert len(epochs) == 100
    assert sum(e.rss for e in epochs) == 100
    assert sum(e.tdoa for e in epochs) == 5
    assert [e.timestamp for e in epochs if e.tdoa] == pytest.approx([2.0, 4.0, 6.0, 8.0, 10.0])
    assert all(e.rss for e in epochs)


def test_equal_rates_merge_every_epoch():
    epochs = schedule(10.0, 10.0, 1.0)
    assert len(epochs) == 10
    assert all(e.rss and e.tdoa for e in epochs)


def test_slow_tdoa_schedule():
    epochs = schedule(10.0, 0.25, 10.0)
    assert [e.timestamp for e in epochs if e.tdoa] == pytest.approx([4.0, 8.0])


def test_schedule_is_sorted():
    times = [e.timestamp for e in schedule(3.0, 7.0, 5.0)]
    assert times == sorted(times)
    assert len(times) == len(set(times))


@pytest.mark.parametrize("rss_rate, tdoa_rate", [(0.0, 0.5), (10.0, 0.0), (10.0, -1.0)])
def test_schedule_rejects_non_positive_rates(rss_rate, tdoa_rate):
    with pytest.raises(ValidationError):
        schedule(rss_rate, tdoa_rate, 10.0)


# Scenarios


def test_default_scenario():
    cfg = default_scenario(seed=3)
    assert cfg.seed == 3
    assert len(cfg.anchors.get_ble_anchors()) == 4
    assert len(cfg.anchors.get_uwb_anchors()) == 4
    truth = build_trajectory(cfg.waypoints, cfg.speed, 0.1)
    assert truth.path_length() == pytest.approx(24.0)


def test_scenario_config_validation():
    cfg = default_scenario()
    with pytest.raises(ValidationError):
        replace(cfg, tdoa_rate=0.0)
    with pytest.raises(ValidationError):
        replace(cfg, seed=-1)
    with pytest.raises(ValidationError):
        replace(cfg, rss_sigma=0.0)


def test_scenario_feed_follows_the_schedule():
    result = run_scenario(_short(default_scenario(), duration=10.0))
    assert result.ble_epochs() == 100
    assert result.uwb_epochs() == 5
    assert len(result.track) == len(result.feed) + 1
    for batch in result.feed:
        assert len(batch.rss) in (0, 4)
        assert len(batch.tdoa) in (0, 3)


def test_same_seed_same_run():
    cfg = _short(default_scenario(seed=5))
    a, b = run_scenario(cfg), run_scenario(cfg)
    assert write_measurement_log(a.feed) == write_measurement_log(b.feed)
    assert write_track(a.track) == write_track(b.track)


def test_different_seeds_share_the_walk_only():
    a = run_scenario(_short(default_scenario(seed=1)))
    b = run_scenario(_short(default_scenario(seed=2)))
    assert a.truth.get_samples() == b.truth.get_samples()
    assert write_measurement_log(a.feed) != write_measurement_log(b.feed)


def test_tdoa_rate_does_not_change_rss_noise():
    cfg = _short(default_scenario(seed=4))
    slow = run_scenario(replace(cfg, tdoa_rate=0.5)).feed
    fast = run_scenario(replace(cfg, tdoa_rate=2.0)).feed
    assert [b.rss for b in slow if b.rss] == [b.rss for b in fast if b.rss]


def test_rss_only_mode_ignores_tdoa():
    cfg = _short(default_scenario(seed=6))
    result = run_scenario(cfg, FilterMode.RSS)
    stripped = [MeasurementBatch(b.timestamp, b.rss, ()) for b in result.feed if b.rss]
    setup = cfg.filter_setup()
    track = run_filter(
        stripped, setup.anchors, setup.path_loss, setup.dwna, init_belief(setup.anchors, timestamp=feed_start(stripped))
    )
    assert np.array_equal(track.positions(), result.track.positions())


def test_projection_drops_emptied_batches():
    feed = run_scenario(_short(default_scenario())).feed
    tdoa_only = project_feed(feed, FilterMode.TDOA)
    assert len(tdoa_only) == sum(1 for b in feed if b.tdoa)
    assert all(not b.rss for b in tdoa_only)
    assert project_feed(feed, FilterMode.HYBRID) == feed


def test_feed_values_are_stored_at_log_precision():
    feed = run_scenario(_short(default_scenario(), duration=3.0)).feed
    for batch in feed:
        for reading in (*batch.rss, *batch.tdoa):
            assert float(format(reading.value, ".9g")) == reading.value


# Sweeps


def test_sweep_shares_rss_noise_and_orders_results():
    spec = SweepSpec(tdoa_rates=(0.5, 2.0), runs=2, base=_short(default_scenario(seed=10), duration=4.0))
    result = run_sweep(spec)
    assert result.baseline.rate is None
    assert [line.rate for line in result.lines] == [0.5, 2.0]
    assert all(len(line.summaries) == 2 for line in [result.baseline, *result.lines])
    assert result.lines[0].cdf.fractions[-1] == 1.0


def test_pooled_median_reads_the_pooled_cdf():
    spec = SweepSpec(tdoa_rates=(2.0,), runs=3, base=_short(default_scenario(seed=8), duration=3.0))
    line = run_sweep(spec).lines[0]
    jobs = [(replace(spec.base, seed=8 + i, tdoa_rate=2.0), FilterMode.HYBRID) for i in range(3)]
    pooled = np.concatenate([run_errors(job) for job in jobs])
    assert line.pooled_median() == float(np.quantile(pooled, 0.5, method="lower"))
    assert line.pooled_median() == summarize(pooled).median


def test_sweep_is_independent_of_the_worker_count():
    spec = SweepSpec(tdoa_rates=(1.0,), runs=2, base=_short(default_scenario(seed=3), duration=3.0))
    serial, parallel = run_sweep(spec, workers=1), run_sweep(spec, workers=2)
    assert serial.lines[0].mean_median() == parallel.lines[0].mean_median()
    assert np.array_equal(serial.baseline.cdf.errors, parallel.baseline.cdf.errors)


def test_sweep_needs_runs():
    with pytest.raises(ValidationError):
        SweepSpec(tdoa_rates=(0.5,), runs=0, base=default_scenario())
    with pytest.raises(ValidationError):
        SweepSpec(tdoa_rates=(0.0,), runs=1, base=default_scenario())
