import math
import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

from suborbit import WeightedLpSpace, WeightSequence  # noqa: E402


@pytest.fixture
def l2():
    return WeightedLpSpace(2.0)


@pytest.fixture
def l1():
    return WeightedLpSpace(1.0)


@pytest.fixture
def geometric_l1():
    return WeightedLpSpace(1.0, WeightSequence.geometric(2.0))


@pytest.fixture
def e():
    return math.e
