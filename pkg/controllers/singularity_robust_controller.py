"""
Singularity-robust projection of the H-infinity law

Joint-velocity components along the right singular vectors whose singular
values fall inside the singular region are attenuated by kappa_s, driven by the
smallest of those singular values. Inside the region, motion that would still
shrink the smallest singular value is cut back along its gradient by the same
region function, unclamped, so the arm backs out below sigma_region / 2.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .base_controller import BaseController, ControlContext, ControlOutput, ControllerSpec, SingularRegionSpec
from .hinf_controller import task_command
from .pseudoinverse import DEFAULT_RANK_TOL, SvdFactors, svd_factors


def f_sigma(sigma: float, spec: SingularRegionSpec) -> float:
    if sigma >= spec.sigma_region:
        return 0.0
    return spec.sigma_far * (1.0 - sigma / spec.sigma_region)


@dataclass
class SingularityRobustResult:
    qdot: np.ndarray
    kappa_s: float
    s_bar: int
    projected: np.ndarray   # N_sbar^T qdot_N
    sigma_min: float


def singularity_robust_law(J: np.ndarray, qdot_N: np.ndarray, spec: SingularRegionSpec,
                           rank_tol: float = DEFAULT_RANK_TOL,
                           factors: Optional[SvdFactors] = None) -> SingularityRobustResult:
    """qdot = (I - kappa_s N_sbar N_sbar^T) qdot_N"""
    if factors is None:
        factors = svd_factors(J, rank_tol)
    s = factors.singular_values
    in_region = np.flatnonzero(s <= spec.sigma_region)
    if in_region.size == 0:
        return SingularityRobustResult(qdot=np.array(qdot_N, dtype=float), kappa_s=0.0, s_bar=0,
                                       projected=np.zeros(0), sigma_min=factors.sigma_min)

    kappa_s = min(f_sigma(float(np.min(s[in_region])), spec), 1.0)
    N_sbar = factors.N[:, in_region]
    projected = N_sbar.T @ qdot_N
    qdot = qdot_N - kappa_s * (N_sbar @ projected)
    return SingularityRobustResult(qdot=qdot, kappa_s=kappa_s, s_bar=int(in_region.size),
                                   projected=projected, sigma_min=factors.sigma_min)


def sigma_min_gradient(J: np.ndarray, factors: SvdFactors) -> np.ndarray:
    """
    d sigma_min / dq from the line-coordinate Jacobian alone

    Column j of J is the joint line [a_j; m_j]; joint i < j moves it by
    [a_i x a_j; a_i x m_j + m_i x a_j].
    """
    k = factors.singular_values.size - 1
    if k < 0:
        return np.zeros(J.shape[1])
    m_s = factors.M[:, k]
    n_s = factors.N[:, k]
    a, mom = J[:3], J[3:]
    n = J.shape[1]
    grad = np.zeros(n)
    for i in range(n - 1):
        da = np.cross(a[:, i], a[:, i + 1:].T).T
        dm = np.cross(a[:, i], mom[:, i + 1:].T).T + np.cross(mom[:, i], a[:, i + 1:].T).T
        grad[i] = m_s @ np.vstack((da, dm)) @ n_s[i + 1:]
    return grad


def sigma_guard(J: np.ndarray, qdot: np.ndarray, factors: SvdFactors, spec: SingularRegionSpec) -> np.ndarray:
    """Scale back the part of qdot that lowers sigma_min while inside the region"""
    sigma = factors.sigma_min
    if sigma > spec.sigma_region:
        return qdot
    grad = sigma_min_gradient(J, factors)
    g2 = float(grad @ grad)
    rate = float(grad @ qdot)
    if g2 == 0.0 or rate >= 0.0:
        return qdot
    return qdot - f_sigma(sigma, spec) * rate / g2 * grad


class SingularityRobustController(BaseController):
    """H-infinity law followed by the singular-region projector"""

    def __init__(self, spec: ControllerSpec):
        super().__init__(kind='hinf_sr', spec=spec)
        self.gains = spec.gains()
        self.region = spec.singular_region or SingularRegionSpec(sigma_region=0.01, sigma_far=2.0)

    def compute(self, ctx: ControlContext) -> ControlOutput:
        gamma, _ = task_command(ctx.error, ctx.xi_d, self.gains)
        factors = svd_factors(ctx.J, self.spec.rank_tol)
        qdot_N = factors.pinv() @ gamma
        result = singularity_robust_law(ctx.J, qdot_N, self.region, self.spec.rank_tol, factors=factors)
        # v_s is the projector's share only; the guard shows up in the residual
        v_s = ctx.J @ (result.qdot - qdot_N)
        qdot = sigma_guard(ctx.J, result.qdot, factors, self.region)
        residual = ctx.J @ qdot - gamma
        return ControlOutput(
            qdot=qdot,
            kappa_s=result.kappa_s,
            s_bar=result.s_bar,
            gamma=gamma,
            v_s=v_s,
            residual=residual,
        )
