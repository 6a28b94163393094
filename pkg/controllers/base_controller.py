"""
Base controller class for dqhinf
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from dq_algebra import PureDualQuaternion, UnitDualQuaternion
from error_metrics import TaskError
from errors import ConstraintViolationError
from kinematics import SerialChain

from .gains import AttenuationSpec, GainPair, hinf_gains
from .pseudoinverse import DEFAULT_RANK_TOL, alsi_pinv, pinv

PINV_MOORE_PENROSE = 'moore_penrose'
PINV_ALSI = 'alsi'


@dataclass(frozen=True)
class SingularRegionSpec:
    sigma_region: float
    sigma_far: float

    def __post_init__(self):
        if not self.sigma_region > 0.0:
            raise ConstraintViolationError(f"sigma_region must be positive, got {self.sigma_region!r}")
        if not self.sigma_far > 1.0:
            raise ConstraintViolationError(f"sigma_far must exceed 1, got {self.sigma_far!r}")

    @property
    def sigma_lower_bound(self) -> float:
        """sigma_min never drops below sigma_region (1 - 1/sigma_far)"""
        return self.sigma_region * (1.0 - 1.0 / self.sigma_far)


@dataclass(frozen=True)
class ControllerSpec:
    kind: str
    gain: Optional[float] = None
    attenuation: Optional[AttenuationSpec] = None
    singular_region: Optional[SingularRegionSpec] = None
    pinv: str = PINV_MOORE_PENROSE
    alsi_eps: float = 0.01
    alsi_lambda_max: float = 2.0
    rank_tol: float = DEFAULT_RANK_TOL

    def gains(self) -> GainPair:
        """Attenuation levels take precedence over a plain gain"""
        if self.attenuation is not None:
            return hinf_gains(self.attenuation)
        if self.gain is None:
            raise ConstraintViolationError(f"controller '{self.kind}' needs a gain or attenuation levels")
        return GainPair(self.gain, self.gain)

    def scalar_gain(self) -> float:
        if self.gain is None:
            raise ConstraintViolationError(f"controller '{self.kind}' needs a gain")
        if not self.gain > 0.0:
            raise ConstraintViolationError(f"gain must be positive, got {self.gain!r}")
        return self.gain


@dataclass(frozen=True)
class ControlContext:
    """Everything a controller may read at one control step"""
    chain: SerialChain
    q: np.ndarray
    x: UnitDualQuaternion
    x_d: UnitDualQuaternion
    xi_d: PureDualQuaternion
    J: np.ndarray
    error: TaskError


@dataclass
class ControlOutput:
    qdot: np.ndarray
    kappa_s: float = 0.0
    s_bar: int = 0
    gamma: Optional[np.ndarray] = None
    v_s: np.ndarray = field(default_factory=lambda: np.zeros(6))
    residual: np.ndarray = field(default_factory=lambda: np.zeros(6))

    @property
    def gamma_norm(self) -> float:
        return 0.0 if self.gamma is None else float(np.linalg.norm(self.gamma))


class BaseController(ABC):
    """Base class for all kinematic controllers"""

    def __init__(self, kind: str, spec: ControllerSpec):
        """
        Initialize controller

        Args:
            kind: Registry name this controller answers to (e.g., 'hinf', 'htm')
            spec: Gains, attenuation levels and pseudoinverse policy
        """
        self.kind = kind.lower()
        self.spec = spec

    def can_handle(self, kind: str) -> bool:
        return kind.strip().lower() == self.kind

    @abstractmethod
    def compute(self, ctx: ControlContext) -> ControlOutput:
        """
        Joint-velocity command for one control step

        Args:
            ctx: Measured state, desired pose and twist, Jacobian and task error

        Returns:
            ControlOutput with qdot and the quantities worth logging
        """
        pass

    def inverse(self, A: np.ndarray) -> np.ndarray:
        """Pseudoinverse of A under the configured policy"""
        if self.spec.pinv == PINV_ALSI:
            return alsi_pinv(A, self.spec.alsi_eps, self.spec.alsi_lambda_max, self.spec.rank_tol)
        return pinv(A, self.spec.rank_tol)
