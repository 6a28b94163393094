"""
H-infinity tracking controller
"""
from typing import Tuple

import numpy as np

from dq_algebra import PureDualQuaternion, vec3, vec6
from error_metrics import TaskError

from .base_controller import BaseController, ControlContext, ControlOutput, ControllerSpec
from .gains import GainPair
from .pseudoinverse import DEFAULT_RANK_TOL, pinv


def feedforward(error: TaskError, xi_d: PureDualQuaternion) -> np.ndarray:
    """vec6(x_tilde xi_d x_tilde*)"""
    x_t = error.x_tilde
    return vec6(x_t * xi_d * x_t.conjugate())


def task_command(error: TaskError, xi_d: PureDualQuaternion, gains: GainPair) -> Tuple[np.ndarray, np.ndarray]:
    """
    Gamma = [kappa_O vec3(O); -kappa_T vec3(T)] + vec6(x_tilde xi_d x_tilde*)

    Returns:
        (Gamma, feedforward part)
    """
    ff = feedforward(error, xi_d)
    fb = np.concatenate((gains.kappa_O * vec3(error.O), -gains.kappa_T * vec3(error.T)))
    return fb + ff, ff


def hinf_tracking_law(J: np.ndarray, error: TaskError, xi_d: PureDualQuaternion, gains: GainPair,
                      rank_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """qdot = J+ Gamma; with xi_d = 0 this is the regulation law"""
    gamma, _ = task_command(error, xi_d, gains)
    return pinv(J, rank_tol) @ gamma


class HInfController(BaseController):
    """Minimum-effort H-infinity tracking law"""

    def __init__(self, spec: ControllerSpec):
        super().__init__(kind='hinf', spec=spec)
        self.gains = spec.gains()

    def compute(self, ctx: ControlContext) -> ControlOutput:
        gamma, _ = task_command(ctx.error, ctx.xi_d, self.gains)
        qdot = self.inverse(ctx.J) @ gamma
        # whatever the arm cannot realize acts as an extra twist disturbance
        residual = ctx.J @ qdot - gamma
        return ControlOutput(qdot=qdot, gamma=gamma, residual=residual)
