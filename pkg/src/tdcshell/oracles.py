"""Independent reference computations for verification.

Nothing here calls the finite element kernels: finite differences,
closed-form catenoid data, 1-D quadrature and log-log order fits only.
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy import integrate

from .errors import CatenoidExistenceError, FitError


def fd_gradient(fn, x, step=None):
    """Central-difference gradient of a scalar function of an array."""
    x = np.asarray(x, dtype=float)
    if step is None:
        step = 1e-6 * max(1.0, float(np.abs(x).max()))
    g = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        e = np.zeros_like(x)
        e[idx] = step
        g[idx] = (fn(x + e) - fn(x - e)) / (2 * step)
    return g


def fd_jacobian(fn, x, step=None):
    """Central-difference Jacobian, shape ``fn(x).shape + x.shape``."""
    x = np.asarray(x, dtype=float)
    if step is None:
        step = 1e-6 * max(1.0, float(np.abs(x).max()))
    f0 = np.asarray(fn(x))
    J = np.zeros(f0.shape + x.shape)
    for idx in np.ndindex(x.shape):
        e = np.zeros_like(x)
        e[idx] = step
        J[(...,) + idx] = (np.asarray(fn(x + e)) - np.asarray(fn(x - e))) / (2 * step)
    return J


def richardson_consistent(fn, x, step, rtol=1e-3):
    """True when halving the FD step changes the gradient by O(step^2) only."""
    g1 = fd_gradient(fn, x, step)
    g2 = fd_gradient(fn, x, step / 2)
    scale = max(np.abs(g2).max(), 1e-300)
    return np.abs(g1 - g2).max() <= rtol * scale


# catenoid -------------------------------------------------------------------

# a cosh(h / a) = R has solutions iff h / R <= max_t t / cosh(t) attained at t tanh t = 1
_T_STAR = 1.1996786402577338
CATENOID_RATIO = _T_STAR / math.cosh(_T_STAR)


def catenoid_reference(radius, half_height):
    """Stable catenoid spanning two coaxial rings of ``radius`` at z = +-half_height.

    Solves ``a cosh(half_height / a) = radius`` for the larger root by
    bracketed Newton iteration and returns ``(a, area, residual)`` with
    ``area = 2 pi a (h + a/2 sinh(2 h / a))``.
    """
    R, h = float(radius), float(half_height)
    if R <= 0 or h <= 0:
        raise CatenoidExistenceError("radius and half_height must be positive")
    if h / R > CATENOID_RATIO:
        raise CatenoidExistenceError(
            f"rings too far apart: h/R = {h / R:.4f} exceeds {CATENOID_RATIO:.4f}")

    # in t = h / a: g(t) = h cosh(t) / t - R; the stable branch is t in (0, t*]
    def g(t):
        return h * math.cosh(t) / t - R

    def dg(t):
        return h * (t * math.sinh(t) - math.cosh(t)) / t ** 2

    lo, hi = 1e-12, _T_STAR  # g(lo) > 0 >= g(hi)
    t = 0.5 * (lo + hi)
    for _ in range(200):
        gt = g(t)
        if gt > 0:
            lo = t
        else:
            hi = t
        d = dg(t)
        t_new = t - gt / d if d != 0 else 0.5 * (lo + hi)
        if not lo < t_new < hi:
            t_new = 0.5 * (lo + hi)
        if abs(t_new - t) <= 1e-16 * t:
            t = t_new
            break
        t = t_new
    a = h / t
    area = 2 * math.pi * a * (h + 0.5 * a * math.sinh(2 * h / a))
    residual = a * math.cosh(h / a) - R
    return a, area, residual


def catenoid_profile(a, z):
    return a * np.cosh(np.asarray(z) / a)


def spheroid_area(r_max, r_min):
    """Surface area of an oblate spheroid by adaptive quadrature of the revolution integral."""
    a, c = float(r_max), float(r_min)

    # x = a sin t, z = c cos t, t in [0, pi]; dA = 2 pi x ds
    def integrand(t):
        return 2 * math.pi * a * math.sin(t) * math.hypot(a * math.cos(t), c * math.sin(t))

    val, _ = integrate.quad(integrand, 0.0, math.pi, epsabs=0.0, epsrel=1e-13, limit=200)
    return val


def spheroid_area_closed_form(r_max, r_min):
    a, c = float(r_max), float(r_min)
    if a == c:
        return 4 * math.pi * a * a
    e = math.sqrt(1 - c * c / (a * a))
    return 2 * math.pi * a * a + math.pi * c * c / e * math.log((1 + e) / (1 - e))


# order fitting ----------------------------------------------------------------

@dataclass
class ConvergenceFit:
    h: np.ndarray
    errors: np.ndarray
    order: float
    r_squared: float
    used: int  # number of finest levels in the fit
    monotone: bool


def fit_order(h_list, e_list, use=None):
    """Least-squares slope of log(e) against log(h) over the finest levels.

    By default the finest ``ceil(n / 2)`` levels are used (at least two).
    """
    h = np.asarray(h_list, dtype=float)
    e = np.asarray(e_list, dtype=float)
    if h.shape != e.shape or h.ndim != 1:
        raise FitError("h and e must be 1-D arrays of equal length")
    if len(h) < 3:
        raise FitError("need at least 3 refinement levels")
    if np.any(~(h > 0)) or np.any(~(e > 0)):
        raise FitError("mesh sizes and errors must be positive")
    order_idx = np.argsort(h)[::-1]  # coarse to fine
    h, e = h[order_idx], e[order_idx]
    k = max(2, math.ceil(len(h) / 2)) if use is None else int(use)
    x, y = np.log(h[-k:]), np.log(e[-k:])
    if np.ptp(x) == 0:
        raise FitError("mesh sizes must differ")
    p, c = np.polyfit(x, y, 1)
    resid = y - (p * x + c)
    ss = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid ** 2) / ss if ss > 0 else 1.0
    return ConvergenceFit(h, e, float(p), float(r2), k, bool(np.all(np.diff(e) < 0)))
