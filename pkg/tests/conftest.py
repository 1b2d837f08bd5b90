import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from koop import CircleSpace, RotationFlow, SpecialFlowSpace

settings.register_profile("koop", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("koop")

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@pytest.fixture(scope="session")
def space():
    return CircleSpace(64, 16)


@pytest.fixture(scope="session")
def rot(space):
    return RotationFlow(space)


@pytest.fixture(scope="session")
def strip_base():
    return SpecialFlowSpace(512, GOLDEN, 1.0, 1000, 0.99)


@pytest.fixture(scope="session")
def small_base():
    return SpecialFlowSpace(8, GOLDEN, 1.0, 50, 0.99)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
