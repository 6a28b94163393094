"""
Pose error, the right-invariant error function and its orientation and
translation parts

The error branch is picked at every call from the sign of Re(P(x_tilde)):
z = 1 - x_tilde when it is nonnegative, z = 1 + x_tilde otherwise. Either way
the same control law applies and drives the pose along the shortest rotation.
"""
from dataclasses import dataclass

import numpy as np

from dq_algebra import (
    DualQuaternion, PureQuaternion, UnitDualQuaternion, translation_of,
)

BRANCH_MINUS = 'minus'
BRANCH_PLUS = 'plus'


@dataclass(frozen=True)
class ErrorDecomposition:
    eta: float
    eta_prime: float
    mu: PureQuaternion
    mu_prime: PureQuaternion

    def v1(self, alpha1: float = 1.0) -> float:
        mu = self.mu.coeffs[1:]
        return alpha1 * ((1.0 - self.eta) ** 2 + float(np.dot(mu, mu)))

    def v2(self, alpha2: float = 1.0) -> float:
        mu_p = self.mu_prime.coeffs[1:]
        return alpha2 * (self.eta_prime ** 2 + float(np.dot(mu_p, mu_p)))

    def unit_constraint(self) -> float:
        """eta eta' + <mu, mu'>; zero for every pose"""
        return self.eta * self.eta_prime + float(np.dot(self.mu.coeffs[1:], self.mu_prime.coeffs[1:]))


@dataclass(frozen=True)
class TaskError:
    x_tilde: UnitDualQuaternion
    z_tilde: DualQuaternion
    branch: str
    O: PureQuaternion
    T: PureQuaternion

    @property
    def primary_norm(self) -> float:
        return float(np.linalg.norm(self.z_tilde.coeffs[:4]))

    @property
    def dual_norm(self) -> float:
        return float(np.linalg.norm(self.z_tilde.coeffs[4:]))

    @property
    def norm(self) -> float:
        """sqrt(|P(z)|^2 + |D(z)|^2)"""
        return float(np.linalg.norm(self.z_tilde.coeffs))


def spatial_error(x: UnitDualQuaternion, x_d: UnitDualQuaternion) -> UnitDualQuaternion:
    """x_tilde = x x_d*"""
    return x.compose(x_d.inverse())


def error_function(x_tilde: UnitDualQuaternion) -> TaskError:
    P = x_tilde.primary
    if P.real >= 0.0:
        z = 1.0 - x_tilde
        zp, zd = z.primary, z.dual
        O = zp.imag
        T = -2.0 * (zd * (1.0 - zp.conjugate()))
        branch = BRANCH_MINUS
    else:
        z = 1.0 + x_tilde
        zp, zd = z.primary, z.dual
        O = P.imag
        T = 2.0 * (zd * (zp - 1.0).conjugate())
        branch = BRANCH_PLUS
    return TaskError(x_tilde=x_tilde, z_tilde=z, branch=branch, O=O, T=T.imag)


def decompose(x_tilde: DualQuaternion) -> ErrorDecomposition:
    c = x_tilde.coeffs
    return ErrorDecomposition(
        eta=float(c[0]),
        eta_prime=float(c[4]),
        mu=PureQuaternion(*c[1:4]),
        mu_prime=PureQuaternion(*c[5:8]),
    )


def translation_error(x: UnitDualQuaternion, x_d: UnitDualQuaternion) -> PureQuaternion:
    """p_tilde = p - r_tilde p_d r_tilde*, read off x x_d*"""
    return translation_of(spatial_error(x, x_d))
