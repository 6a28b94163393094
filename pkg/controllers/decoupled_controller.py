"""
Decoupled translation / rotation controller
"""
import numpy as np

from dq_algebra import C8, hamilton_minus4, rotation_of, translation_of, vec4
from kinematics import jacobian_r8, translation_jacobian

from .base_controller import BaseController, ControlContext, ControlOutput, ControllerSpec


def decoupled_jacobian(ctx: ControlContext) -> np.ndarray:
    """[J_p; N_R4], N_R4 being the four upper rows of H-(x_d) C8 J_R8"""
    J_p = translation_jacobian(ctx.chain, ctx.q, x=ctx.x, J=ctx.J)
    J_r8 = jacobian_r8(ctx.chain, ctx.q, x=ctx.x, J=ctx.J)
    N_r4 = hamilton_minus4(rotation_of(ctx.x_d)) @ C8[:4, :4] @ J_r8[:4]
    return np.vstack((J_p, N_r4))


class DecoupledController(BaseController):
    """qdot = J_dec+ kappa [p_d - p; vec4(1 - r* r_d)]"""

    def __init__(self, spec: ControllerSpec):
        super().__init__(kind='decoupled', spec=spec)
        self.kappa = spec.scalar_gain()

    def compute(self, ctx: ControlContext) -> ControlOutput:
        J_dec = decoupled_jacobian(ctx)
        r = rotation_of(ctx.x)
        r_d = rotation_of(ctx.x_d)
        p = translation_of(ctx.x).coeffs[1:]
        p_d = translation_of(ctx.x_d).coeffs[1:]
        task = np.concatenate((p_d - p, vec4(1.0 - r.conjugate() * r_d)))
        return ControlOutput(qdot=self.inverse(J_dec) @ (self.kappa * task))
