"""Three-dimensional hyperelastic material models.

All functions are vectorised over leading axes: ``F`` has shape
``(..., 3, 3)``, stresses ``(..., 3, 3)`` and tangents
``(..., 3, 3, 3, 3)`` with ``L[..., i, J, k, L] = dP_iJ / dF_kL``.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np

from .errors import InvertedElementError, ParameterError

_I = np.eye(3)


@dataclass(frozen=True)
class MaterialParams:
    """Elastic constants and membrane thickness (SI units).

    ``bulk`` uses E nu / (1 - nu^2), as in the Mooney-Rivlin model this
    package reproduces; ``mu1 = mu2 = mu / 2``.
    """

    E: float
    nu: float
    thickness: float = 1.0
    bulk: float = field(init=False)
    mu: float = field(init=False)
    mu1: float = field(init=False)
    mu2: float = field(init=False)

    def __post_init__(self):
        if not self.E > 0:
            raise ParameterError(f"E must be positive, got {self.E}")
        if not 0.0 <= self.nu <= 0.5:
            raise ParameterError(f"nu must lie in [0, 0.5], got {self.nu}")
        if not self.thickness > 0:
            raise ParameterError(f"thickness must be positive, got {self.thickness}")
        mu = self.E / (2.0 * (1.0 + self.nu))
        object.__setattr__(self, "bulk", self.E * self.nu / (1.0 - self.nu ** 2))
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "mu1", mu / 2.0)
        object.__setattr__(self, "mu2", mu / 2.0)

    @property
    def lame_lambda(self):
        if self.nu >= 0.5:
            raise ParameterError("nu = 0.5 makes the 3-D Lame parameter lambda singular")
        return self.E * self.nu / ((1.0 + self.nu) * (1.0 - 2.0 * self.nu))


def _det(F):
    J = np.linalg.det(F)
    if np.any(~(J > 0)):
        raise InvertedElementError(f"det F <= 0 (min {np.min(J):.3e})")
    return J


def _mr_parts(F, p):
    F = np.asarray(F, dtype=float)
    J = _det(F)
    G = np.swapaxes(np.linalg.inv(F), -1, -2)  # F^{-T}
    C = np.swapaxes(F, -1, -2) @ F
    I1 = np.einsum("...ij,...ij->...", F, F)
    I2 = 0.5 * (I1 ** 2 - np.einsum("...ij,...ji->...", C, C))
    return F, J, G, C, I1, I2


def mooney_rivlin_psi(F, params):
    """Strain energy density 1/2 mu1 I1^ + 1/2 mu2 I2^ + 1/2 K (J - 1)^2."""
    F, J, G, C, I1, I2 = _mr_parts(F, params)
    return (0.5 * params.mu1 * J ** (-2 / 3) * I1
            + 0.5 * params.mu2 * J ** (-4 / 3) * I2
            + 0.5 * params.bulk * (J - 1.0) ** 2)


def _mr_coefficients(J, I1, I2, p):
    a1 = p.mu1 * J ** (-2 / 3)
    a2 = (-(p.mu1 / 3) * J ** (-2 / 3) * I1
          - (2 * p.mu2 / 3) * J ** (-4 / 3) * I2
          + p.bulk * (J - 1.0) * J)
    a3 = p.mu2 * J ** (-4 / 3)
    return a1, a2, a3


def mooney_rivlin_stress(F, params):
    """First Piola-Kirchhoff stress P = a1 F + a2 F^{-T} + a3 (I1 F - F C)."""
    F, J, G, C, I1, I2 = _mr_parts(F, params)
    a1, a2, a3 = _mr_coefficients(J, I1, I2, params)
    FC = F @ C
    return (a1[..., None, None] * F + a2[..., None, None] * G
            + a3[..., None, None] * (I1[..., None, None] * F - FC))


def mooney_rivlin_stress_tangent(F, params):
    """Stress and tangent together (shares the kinematic work).

    With ``P = a1 F + a2 G + a3 H`` (``G = F^{-T}``, ``H = I1 F - F C``)
    the tangent is a sum of outer products of the coefficient gradients
    with ``F, G, H``, plus the terms coming from ``dG`` and ``dH`` that
    couple the indices crosswise or through Kronecker deltas.
    """
    p = params
    F, J, G, C, I1, I2 = _mr_parts(F, p)
    a1, a2, a3 = _mr_coefficients(J, I1, I2, p)
    B = F @ np.swapaxes(F, -1, -2)
    H = I1[..., None, None] * F - F @ C
    s = (..., None, None)
    P = a1[s] * F + a2[s] * G + a3[s] * H

    j23, j43 = J ** (-2 / 3), J ** (-4 / 3)
    da1 = (-2 / 3 * p.mu1 * j23)[s] * G
    da2 = ((2 / 9 * p.mu1 * j23 * I1 + 8 / 9 * p.mu2 * j43 * I2
            + p.bulk * (2 * J - 1.0) * J)[s] * G
           - (2 / 3 * p.mu1 * j23)[s] * F - (4 / 3 * p.mu2 * j43)[s] * H)
    da3 = (-4 / 3 * p.mu2 * j43)[s] * G

    X1 = np.stack([F, G, H, F], axis=-3)
    Y1 = np.stack([da1, da2, da3, 2 * a3[s] * F], axis=-3)
    X2 = np.stack([a2[s] * G, a3[s] * F], axis=-3)
    Y2 = np.stack([G, F], axis=-3)
    L = np.einsum("...pij,...pkl->...ijkl", X1, Y1)
    L -= np.einsum("...pil,...pkj->...ijkl", X2, Y2)
    M = (a1 + a3 * I1)[s] * _I - a3[s] * C  # delta_ik part
    aB = a3[s] * B  # delta_JL part
    for i in range(3):
        L[..., i, :, i, :] += M
        L[..., :, i, :, i] -= aB
    return P, L


def mooney_rivlin_normal_block(F, N, params):
    """Stress and ``L_NN[i, k] = N_J L[i, J, k, L] N_L`` without forming L."""
    p = params
    F, J, G, C, I1, I2 = _mr_parts(F, p)
    N = np.asarray(N, dtype=float)
    a1, a2, a3 = _mr_coefficients(J, I1, I2, p)
    B = F @ np.swapaxes(F, -1, -2)
    H = I1[..., None, None] * F - F @ C
    P = a1[..., None, None] * F + a2[..., None, None] * G + a3[..., None, None] * H

    mv = lambda A: np.einsum("...ij,...j->...i", A, N)
    fn, gn, hn = mv(F), mv(G), mv(H)
    nCn = np.einsum("...i,...i->...", fn, fn)
    j23, j43 = J ** (-2 / 3), J ** (-4 / 3)
    s = (..., None)
    da1n = (-2 / 3 * p.mu1 * j23)[s] * gn
    da2n = ((2 / 9 * p.mu1 * j23 * I1 + 8 / 9 * p.mu2 * j43 * I2
             + p.bulk * (2 * J - 1.0) * J)[s] * gn
            - (2 / 3 * p.mu1 * j23)[s] * fn
            - (4 / 3 * p.mu2 * j43)[s] * hn)
    da3n = (-4 / 3 * p.mu2 * j43)[s] * gn
    outer = lambda a, b: a[..., :, None] * b[..., None, :]
    eye = np.eye(3)
    s2 = (..., None, None)
    LNN = (outer(fn, da1n) + a1[s2] * eye
           + outer(gn, da2n) - a2[s2] * outer(gn, gn)
           + outer(hn, da3n)
           + a3[s2] * (outer(fn, fn) + (I1 - nCn)[s2] * eye - B))
    return P, LNN


def mooney_rivlin_tangent(F, params):
    return mooney_rivlin_stress_tangent(F, params)[1]


def hooke_tangent(params):
    """Constant isotropic tensor lambda d_ij d_kl + mu (d_ik d_jl + d_il d_jk)."""
    lam, mu = params.lame_lambda, params.mu
    return (lam * np.einsum("ij,kl->ijkl", _I, _I)
            + mu * (np.einsum("ik,jl->ijkl", _I, _I) + np.einsum("il,jk->ijkl", _I, _I)))


def hooke_stress(F, params):
    """P = L_Hooke : (F - I)."""
    return np.einsum("ijkl,...kl->...ij", hooke_tangent(params), np.asarray(F) - _I)


def hooke_psi(F, params):
    D = np.asarray(F) - _I
    return 0.5 * np.einsum("...ij,ijkl,...kl->...", D, hooke_tangent(params), D)


class Material(ABC):
    """Hyperelastic model: energy, stress and tangent of F."""

    name = "material"

    def __init__(self, params):
        self.params = params

    @property
    def E(self):
        return self.params.E

    @property
    def thickness(self):
        return self.params.thickness

    @abstractmethod
    def psi(self, F):
        ...

    @abstractmethod
    def stress(self, F):
        ...

    @abstractmethod
    def tangent(self, F):
        ...

    def stress_tangent(self, F):
        return self.stress(F), self.tangent(F)

    def stress_normal_block(self, F, N):
        """Stress and the 3x3 block ``N . L . N`` used by the director solve."""
        P, L = self.stress_tangent(F)
        return P, np.einsum("...j,...ijkl,...l->...ik", N, L, N)

    def __repr__(self):
        p = self.params
        return f"{type(self).__name__}(E={p.E!r}, nu={p.nu!r}, thickness={p.thickness!r})"


class MooneyRivlin(Material):
    name = "mooney-rivlin"

    def psi(self, F):
        return mooney_rivlin_psi(F, self.params)

    def stress(self, F):
        return mooney_rivlin_stress(F, self.params)

    def tangent(self, F):
        return mooney_rivlin_tangent(F, self.params)

    def stress_tangent(self, F):
        return mooney_rivlin_stress_tangent(F, self.params)

    def stress_normal_block(self, F, N):
        return mooney_rivlin_normal_block(F, N, self.params)


class Hooke(Material):
    """Linear elasticity written in terms of F; rejects nu = 0.5."""

    name = "hooke"

    def __init__(self, params):
        params.lame_lambda  # raises for nu = 0.5
        super().__init__(params)
        self._L = hooke_tangent(params)

    def psi(self, F):
        return hooke_psi(F, self.params)

    def stress(self, F):
        return np.einsum("ijkl,...kl->...ij", self._L, np.asarray(F) - _I)

    def tangent(self, F):
        F = np.asarray(F)
        return np.broadcast_to(self._L, F.shape[:-2] + (3, 3, 3, 3))


MODELS = {"mooney-rivlin": MooneyRivlin, "mooney_rivlin": MooneyRivlin, "hooke": Hooke}


def make_material(model, E, nu, thickness=1.0):
    try:
        cls = MODELS[model.lower()]
    except KeyError:
        raise ParameterError(f"unknown material model {model!r}") from None
    return cls(MaterialParams(E, nu, thickness))
