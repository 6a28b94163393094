"""
Kinematic controllers for dqhinf
"""
from typing import Optional

import numpy as np

from dq_algebra import PureDualQuaternion, UnitDualQuaternion
from error_metrics import error_function, spatial_error
from errors import UnknownControllerError
from kinematics import SerialChain, fkm, jacobian

from .base_controller import (
    PINV_ALSI, PINV_MOORE_PENROSE, BaseController, ControlContext, ControlOutput,
    ControllerSpec, SingularRegionSpec,
)
from .decoupled_controller import DecoupledController
from .dq_r8_controller import DqR8Controller
from .dq_robust_controller import DqRobustController
from .gains import AttenuationSpec, GainPair, hinf_gains
from .hinf_controller import HInfController, hinf_tracking_law, task_command
from .htm_controller import HtmController
from .pseudoinverse import SvdFactors, alsi_pinv, pinv, svd_factors
from .singularity_robust_controller import (
    SingularityRobustController, f_sigma, sigma_guard, sigma_min_gradient, singularity_robust_law,
)

CONTROLLER_CLASSES = [
    HInfController,
    SingularityRobustController,
    DqR8Controller,
    DqRobustController,
    HtmController,
    DecoupledController,
]

CONTROLLER_KINDS = ('hinf', 'hinf_sr', 'dq_r8', 'dq_robust', 'htm', 'decoupled')
BASELINE_KINDS = ('dq_r8', 'dq_robust', 'htm', 'decoupled')
# kinds whose Jacobian has six rows, where adaptive damping is meaningful
ALSI_KINDS = ('hinf', 'htm')


def create_controller(spec: ControllerSpec) -> BaseController:
    for kind, controller_class in zip(CONTROLLER_KINDS, CONTROLLER_CLASSES):
        if kind == spec.kind.strip().lower():
            return controller_class(spec)
    raise UnknownControllerError(f"unknown controller kind '{spec.kind}', expected one of {', '.join(CONTROLLER_KINDS)}")


def baseline_control(kind: str, chain: SerialChain, q, x_d: UnitDualQuaternion, kappa: float,
                     x: Optional[UnitDualQuaternion] = None) -> np.ndarray:
    """
    One of the comparison controllers evaluated at a single state

    Args:
        kind: dq_r8, dq_robust, htm or decoupled
        x: Measured pose; fkm(chain, q) when omitted
    """
    if kind not in BASELINE_KINDS:
        raise UnknownControllerError(f"unknown baseline kind '{kind}', expected one of {', '.join(BASELINE_KINDS)}")
    q = np.asarray(q, dtype=float)
    if x is None:
        x = fkm(chain, q)
    ctx = ControlContext(
        chain=chain, q=q, x=x, x_d=x_d, xi_d=PureDualQuaternion.zero(),
        J=jacobian(chain, q), error=error_function(spatial_error(x, x_d)),
    )
    return create_controller(ControllerSpec(kind=kind, gain=kappa)).compute(ctx).qdot


__all__ = [
    'AttenuationSpec', 'BaseController', 'ControlContext', 'ControlOutput', 'ControllerSpec',
    'GainPair', 'SingularRegionSpec', 'SvdFactors', 'PINV_ALSI', 'PINV_MOORE_PENROSE',
    'CONTROLLER_KINDS', 'BASELINE_KINDS', 'ALSI_KINDS',
    'HInfController', 'SingularityRobustController', 'DqR8Controller', 'DqRobustController',
    'HtmController', 'DecoupledController',
    'alsi_pinv', 'baseline_control', 'create_controller', 'f_sigma', 'hinf_gains',
    'hinf_tracking_law', 'pinv', 'sigma_guard', 'sigma_min_gradient', 'singularity_robust_law',
    'svd_factors', 'task_command',
]
