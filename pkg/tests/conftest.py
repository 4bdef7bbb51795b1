import pytest

from srampuf.analytics import threshold_sweep
from srampuf.simulate import Calibration, collect_samples, new_device

ENROLL_SEED0 = 0
TEST_SEED0 = {"NTNA": 10_000, "HTNA": 20_000, "NTWA": 30_000}


@pytest.fixture(scope="session")
def default_cal():
    return Calibration()


@pytest.fixture(scope="session")
def enrolled_device(default_cal):
    """A full-size device with a 300-sample enrollment set and 300 fresh test
    samples per condition. Expensive; shared across the suite."""
    device = new_device(7, calibration=default_cal)
    enroll_samples = collect_samples(device, default_cal.condition("NTNA"), 300,
                                     seed0=ENROLL_SEED0)
    test_samples = {
        kind: collect_samples(device, default_cal.condition(kind), 300, seed0=seed0)
        for kind, seed0 in TEST_SEED0.items()
    }
    return {"device": device, "enroll": enroll_samples, "test": test_samples}


@pytest.fixture(scope="session")
def default_sweep(enrolled_device):
    return threshold_sweep(enrolled_device["enroll"], enrolled_device["test"])
