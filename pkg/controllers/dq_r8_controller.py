"""
Dual quaternion controller on the full 8-coefficient pose error
"""
from dq_algebra import vec8
from kinematics import jacobian_r8

from .base_controller import BaseController, ControlContext, ControlOutput, ControllerSpec


class DqR8Controller(BaseController):
    """qdot = J_R8+ kappa vec8(x_d - x)"""

    def __init__(self, spec: ControllerSpec):
        super().__init__(kind='dq_r8', spec=spec)
        self.kappa = spec.scalar_gain()

    def compute(self, ctx: ControlContext) -> ControlOutput:
        J_r8 = jacobian_r8(ctx.chain, ctx.q, x=ctx.x, J=ctx.J)
        error = vec8(ctx.x_d - ctx.x)
        return ControlOutput(qdot=self.inverse(J_r8) @ (self.kappa * error))
