"""
Shared pytest fixtures
Small grids, seeded generators and the common interval families
"""

import numpy as np
import pytest

from rlplab.core import close_pool, settings
from rlplab.schemas import Signal
from rlplab.services import FrequencyFamilyService


@pytest.fixture(scope="session", autouse=True)
def worker_pool():
    """Tear the shared pool down once the session ends"""
    yield
    close_pool()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def random_signal(rng):
    """Factory for complex Gaussian signals"""

    def make(n: int, domain_length: float = 1.0) -> Signal:
        return Signal(samples=rng.standard_normal(n) + 1j * rng.standard_normal(n), domain_length=domain_length)

    return make


@pytest.fixture
def lacunary64():
    return FrequencyFamilyService.make_lacunary(2, 64)


@pytest.fixture
def lacunary256():
    return FrequencyFamilyService.make_lacunary(2, 256)


@pytest.fixture
def report_dir(tmp_path, monkeypatch):
    """Route every report into a temporary directory"""
    monkeypatch.setattr(settings, "OUTPUT_DIR", str(tmp_path))
    return tmp_path
