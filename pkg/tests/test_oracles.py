import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tdcshell.errors import CatenoidExistenceError, FitError
from tdcshell.oracles import (CATENOID_RATIO, catenoid_profile, catenoid_reference, fd_gradient,
                              fd_jacobian, fit_order, richardson_consistent, spheroid_area,
                              spheroid_area_closed_form)

GOLDEN = Path(__file__).parent / "data" / "golden_values.txt"


def golden():
    out = {}
    for line in GOLDEN.read_text().splitlines():
        if line.startswith("#") or not line.strip():
            continue
        name, value, residual, _date = line.split()
        out[name] = (float(value), float(residual))
    return out


def test_fd_helpers_on_polynomials():
    f = lambda x: x[0] ** 3 + 2 * x[0] * x[1]
    x = np.array([1.5, -0.5])
    np.testing.assert_allclose(fd_gradient(f, x), [3 * 1.5 ** 2 + 2 * -0.5, 3.0], rtol=1e-9)
    A = np.arange(6.0).reshape(2, 3)
    np.testing.assert_allclose(fd_jacobian(lambda v: A @ v, np.ones(3)), A, atol=1e-9)
    J = fd_jacobian(lambda M: M.T, np.eye(2))
    assert J.shape == (2, 2, 2, 2) and J[0, 1, 1, 0] == pytest.approx(1.0)
    assert richardson_consistent(lambda v: np.sin(v[0]), np.array([0.3]), 1e-3)
    kink = lambda v: abs(v[0] - 2e-4)
    assert not richardson_consistent(kink, np.array([0.0]), 1e-3)


def test_catenoid_reference_matches_golden_file():
    a, area, res = catenoid_reference(0.5, 0.3)
    g = golden()
    assert a == pytest.approx(g["catenoid_a_R0.5_h0.3"][0], rel=1e-14)
    assert area == pytest.approx(g["catenoid_area_R0.5_h0.3"][0], rel=1e-14)
    assert abs(res) <= 1e-15
    assert a * math.cosh(0.3 / a) == pytest.approx(0.5, rel=1e-15)
    # stable branch: the neck is wider than the unstable root's
    assert 0.3 / a < 1.1996786402577338
    assert catenoid_profile(a, 0.3) == pytest.approx(0.5, rel=1e-15)
    assert catenoid_profile(a, 0.0) == pytest.approx(a)


def test_catenoid_area_is_below_cylinder_area():
    _, area, _ = catenoid_reference(0.5, 0.3)
    assert area < golden()["cylinder_lateral_area_R0.5_H0.6"][0]


def test_catenoid_limits():
    a, area, _ = catenoid_reference(1.0, 1e-4)
    assert area == pytest.approx(2 * math.pi * 2e-4, rel=1e-6)
    assert a == pytest.approx(1.0, rel=1e-7)  # neck radius tends to the ring radius
    _, _, res = catenoid_reference(1.0, CATENOID_RATIO * (1 - 1e-12))
    assert abs(res) <= 1e-12
    assert CATENOID_RATIO == pytest.approx(0.6627434193, rel=1e-9)


@given(st.floats(0.05, 0.65))
def test_catenoid_residual_and_monotone_neck(ratio):
    a, area, res = catenoid_reference(1.0, ratio)
    assert abs(res) <= 1e-13
    a2, _, _ = catenoid_reference(1.0, ratio * 1.001)
    assert a2 < a


@pytest.mark.parametrize("args", [(0.5, 0.34), (1.0, 0.7), (0.0, 0.1), (1.0, -1.0)])
def test_catenoid_nonexistence(args):
    with pytest.raises(CatenoidExistenceError):
        catenoid_reference(*args)


@pytest.mark.parametrize("a,c", [(1.0, 0.5), (2.0, 0.3), (1.0, 0.999), (1.0, 1.0)])
def test_spheroid_quadrature_matches_closed_form(a, c):
    assert spheroid_area(a, c) == pytest.approx(spheroid_area_closed_form(a, c), rel=1e-12)
    assert spheroid_area(1.0, 0.5) == pytest.approx(golden()["spheroid_area_1_0.5"][0], rel=1e-14)


@pytest.mark.parametrize("p", [1.0, 2.0, 4.0])
def test_fit_order_exact_power_law(p):
    h = 0.5 ** np.arange(5)
    fit = fit_order(h, 3.0 * h ** p)
    assert fit.order == pytest.approx(p, abs=1e-12)
    assert fit.used == 3 and fit.monotone and fit.r_squared == pytest.approx(1.0)


def test_fit_order_ignores_preasymptotic_levels(rng):
    h = 0.5 ** np.arange(6)
    e = h ** 2 * (1 + 0.01 * rng.normal(size=6))
    e[:2] *= 10  # polluted coarse levels
    assert fit_order(h, e).order == pytest.approx(2.0, abs=0.1)
    assert fit_order(h[::-1], e[::-1]).order == pytest.approx(2.0, abs=0.1)


@pytest.mark.parametrize("h,e", [([1, 0.5], [1, 0.25]), ([1, 0.5, 0.25], [1, 0, 0.1]),
                                 ([1, 1, 1], [1, 0.5, 0.2]), ([[1, 2, 3]], [[1, 2, 3]])])
def test_fit_order_rejects_bad_input(h, e):
    with pytest.raises(FitError):
        fit_order(h, e)
