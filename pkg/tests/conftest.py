import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from tdcshell.mesh import SurfaceMesh, generate_cylinder

settings.register_profile("dev", max_examples=20, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "dev"))

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_rotation(rng):
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] *= -1
    return q


def random_F(rng, lo=0.5, hi=2.0):
    """Random deformation gradient with det in [lo, hi]."""
    while True:
        F = np.eye(3) + 0.3 * rng.normal(size=(3, 3))
        d = np.linalg.det(F)
        if lo <= d <= hi:
            return F


@pytest.fixture
def unit_triangle():
    return SurfaceMesh([[0, 0, 0], [1, 0, 0], [0, 1, 0]], [[0, 1, 2]], 1)


@pytest.fixture
def small_cylinder():
    return generate_cylinder(0.5, 0.6, 2, 8, 2)
