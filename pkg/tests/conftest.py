import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from covariant_em.exterior import Metric
from covariant_em.sampling import random_metric

settings.register_profile(
    "repo", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def eta():
    return Metric.minkowski()


@pytest.fixture(params=["minkowski", "skewed", "random"])
def metric(request):
    if request.param == "minkowski":
        return Metric.minkowski()
    if request.param == "skewed":
        return Metric(np.array([
            [-1.2, 0.1, 0.05, 0.0],
            [0.1, 0.9, 0.02, 0.03],
            [0.05, 0.02, 1.1, 0.0],
            [0.0, 0.03, 0.0, 1.3],
        ]))
    return random_metric(np.random.default_rng(5))


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
