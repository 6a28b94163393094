"""
Dual quaternion controller on the invariant error 1 - x* x_d
"""
import numpy as np

from dq_algebra import C8, hamilton_minus, vec8
from kinematics import jacobian_r8

from .base_controller import BaseController, ControlContext, ControlOutput, ControllerSpec


def invariant_jacobian(J_r8: np.ndarray, x_d) -> np.ndarray:
    """N_R8 = H-(x_d) C8 J_R8"""
    return hamilton_minus(x_d) @ C8 @ J_r8


class DqRobustController(BaseController):
    """qdot = N_R8+ kappa vec8(1 - x* x_d)"""

    def __init__(self, spec: ControllerSpec):
        super().__init__(kind='dq_robust', spec=spec)
        self.kappa = spec.scalar_gain()

    def compute(self, ctx: ControlContext) -> ControlOutput:
        J_r8 = jacobian_r8(ctx.chain, ctx.q, x=ctx.x, J=ctx.J)
        N_r8 = invariant_jacobian(J_r8, ctx.x_d)
        error = vec8(1.0 - ctx.x.conjugate() * ctx.x_d)
        return ControlOutput(qdot=self.inverse(N_r8) @ (self.kappa * error))
