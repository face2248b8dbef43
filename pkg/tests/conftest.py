import warnings

import pytest
from hypothesis import HealthCheck, settings

from mlcp.instance import EpsilonBoundWarning

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(autouse=True)
def _quiet_epsilon():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", EpsilonBoundWarning)
        yield
