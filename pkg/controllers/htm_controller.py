"""
Homogeneous-transformation-matrix controller
"""
import numpy as np
from scipy.spatial.transform import Rotation

from dq_algebra import rotation_of, translation_of
from kinematics import geometric_jacobian, rotation_matrix

from .base_controller import BaseController, ControlContext, ControlOutput, ControllerSpec


def angle_axis_error(R: np.ndarray, R_d: np.ndarray) -> np.ndarray:
    """phi n of R_tilde = R_d R^T, angle in [0, pi]"""
    return Rotation.from_matrix(R_d @ R.T).as_rotvec()


def htm_task_vector(x, x_d) -> np.ndarray:
    """[p_d - p; phi n]"""
    p = translation_of(x).coeffs[1:]
    p_d = translation_of(x_d).coeffs[1:]
    phi_n = angle_axis_error(rotation_matrix(rotation_of(x)), rotation_matrix(rotation_of(x_d)))
    return np.concatenate((p_d - p, phi_n))


class HtmController(BaseController):
    """qdot = J_G+ kappa [p_d - p; phi n]"""

    def __init__(self, spec: ControllerSpec):
        super().__init__(kind='htm', spec=spec)
        self.kappa = spec.scalar_gain()

    def compute(self, ctx: ControlContext) -> ControlOutput:
        J_G = geometric_jacobian(ctx.chain, ctx.q, x=ctx.x, J=ctx.J)
        task = htm_task_vector(ctx.x, ctx.x_d)
        return ControlOutput(qdot=self.inverse(J_G) @ (self.kappa * task))
