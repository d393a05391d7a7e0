import numpy as np
import pytest

from modules.models.elements import Deployment
from modules.models.measurements import MeasurementBatch, RssReading, TdoaReading
from modules.models.propagation import rss_predict, tdoa_predict
from modules.sim.scenario import default_scenario
from modules.util.logger import Logger


@pytest.fixture
def room() -> Deployment:
    return default_scenario().anchors


@pytest.fixture(autouse=True)
def fresh_logger():
    # Bind the console handler to the stream captured by the running test
    Logger.reset()
    yield
    Logger.reset()


def noiseless_batch(t, pos, anchors, pl, rss_sigma=1.0, tdoa_sigma=0.0848, with_rss=True, with_tdoa=True):
    """Batch holding the exact model values for a tag at pos."""
    rss, tdoa = [], []
    if with_rss:
        rss = [RssReading(a.id, rss_predict(pos, a, pl), rss_sigma) for a in anchors.get_ble_anchors()]
    if with_tdoa:
        ref = anchors.get_reference_anchor()
        tdoa = [
            TdoaReading(a.id, ref.id, tdoa_predict(pos, a, ref), tdoa_sigma)
            for a in anchors.get_uwb_anchors()
            if a.id != ref.id
        ]
    return MeasurementBatch(t, rss, tdoa)


def random_psd(rng: np.random.Generator, n: int = 4) -> np.ndarray:
    a = rng.normal(size=(n, n))
    return a @ a.T + 0.1 * np.eye(n)
