"""
Desired-trajectory generators

Each generator returns (x_d, xi_d) with x_d' = (1/2) xi_d x_d.
"""
import math
from dataclasses import dataclass, field
from typing import Tuple, Union

import numpy as np

from dq_algebra import (
    PureDualQuaternion, PureQuaternion, UnitDualQuaternion, UnitQuaternion, _dqmul,
    exp_pure, log_unit, pose_from,
)
from disturbances import square_wave, triangle_wave
from errors import ConstraintViolationError

TRAJECTORY_KINDS = ('setpoint', 'screw', 'moving_target')


def quintic(tau: float) -> Tuple[float, float]:
    """Time scaling s(tau) = 10 tau^3 - 15 tau^4 + 6 tau^5 and ds/dtau"""
    tau = min(max(tau, 0.0), 1.0)
    t2 = tau * tau
    s = t2 * tau * (10.0 - 15.0 * tau + 6.0 * t2)
    ds = 30.0 * t2 * (1.0 - tau) ** 2
    return s, ds


@dataclass(frozen=True)
class SetPoint:
    pose: UnitDualQuaternion
    feedforward_known: bool = True

    def evaluate(self, t: float):
        return self.pose, PureDualQuaternion.zero()


@dataclass(frozen=True)
class ScrewTrajectory:
    """
    Screw-linear interpolation from start to end

    Waits until start_time, moves for duration, holds for hold seconds and,
    with return_back, moves back to start over another duration.
    """
    start: UnitDualQuaternion
    end: UnitDualQuaternion
    duration: float
    start_time: float = 0.0
    hold: float = 0.0
    return_back: bool = False
    feedforward_known: bool = True
    _log: np.ndarray = field(default=None, init=False, repr=False, compare=False)
    _end_rep: UnitDualQuaternion = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.duration > 0.0:
            raise ConstraintViolationError(f"screw duration must be positive, got {self.duration!r}")
        if self.start_time < 0.0 or self.hold < 0.0:
            raise ConstraintViolationError("start_time and hold must be nonnegative")
        L = log_unit(self.end.compose(self.start.inverse()))
        reached = _dqmul(exp_pure(L).coeffs, self.start.coeffs)
        end_rep = self.end if float(np.dot(reached, self.end.coeffs)) >= 0.0 else UnitDualQuaternion.from_array(-self.end.coeffs)
        object.__setattr__(self, '_log', L.coeffs)
        object.__setattr__(self, '_end_rep', end_rep)

    def _progress(self, t: float) -> Tuple[float, float]:
        """(s, ds/dt) along the outbound screw"""
        t1 = t - self.start_time
        if t1 <= 0.0:
            return 0.0, 0.0
        if t1 < self.duration:
            s, ds = quintic(t1 / self.duration)
            return s, ds / self.duration
        t2 = t1 - self.duration - self.hold
        if not self.return_back or t2 <= 0.0:
            return 1.0, 0.0
        if t2 < self.duration:
            s, ds = quintic(t2 / self.duration)
            return 1.0 - s, -ds / self.duration
        return 0.0, 0.0

    def evaluate(self, t: float):
        s, sdot = self._progress(t)
        if s == 0.0:
            x_d = self.start
        elif s == 1.0:
            x_d = self._end_rep
        else:
            step = exp_pure(PureDualQuaternion.from_vec6(s * _vec6(self._log)))
            x_d = UnitDualQuaternion.from_array(_dqmul(step.coeffs, self.start.coeffs))
        xi_d = PureDualQuaternion.from_vec6(2.0 * sdot * _vec6(self._log))
        return x_d, xi_d


@dataclass(frozen=True)
class MovingTarget:
    """
    Target carried by a base that translates back and forth at fixed speed

    Each axis of the base follows a triangle wave with its own period; the
    controller is not told the base velocity.
    """
    offset: UnitDualQuaternion
    speeds: Tuple[float, float, float] = (0.1, 0.1, 0.0)
    periods: Tuple[float, float, float] = (2.5, 3.45, 2.5)
    feedforward_known: bool = False

    def __post_init__(self):
        if len(self.speeds) != 3 or len(self.periods) != 3:
            raise ConstraintViolationError("moving target needs 3 speeds and 3 periods")
        if any(p <= 0.0 for p in self.periods):
            raise ConstraintViolationError("moving target periods must be positive")

    def base_position(self, t: float) -> np.ndarray:
        return np.array([v * triangle_wave(t, P) for v, P in zip(self.speeds, self.periods)])

    def base_velocity(self, t: float) -> np.ndarray:
        return np.array([v * square_wave(t, P) for v, P in zip(self.speeds, self.periods)])

    def evaluate(self, t: float):
        base = pose_from(UnitQuaternion(), PureQuaternion(*self.base_position(t)))
        x_d = base.compose(self.offset)
        xi_d = PureDualQuaternion.from_vec6(np.concatenate((np.zeros(3), self.base_velocity(t))))
        return x_d, xi_d


TrajectorySpec = Union[SetPoint, ScrewTrajectory, MovingTarget]


def _vec6(c: np.ndarray) -> np.ndarray:
    return np.array([c[1], c[2], c[3], c[5], c[6], c[7]])


def desired_trajectory(spec: TrajectorySpec, t: float):
    """
    Desired pose and twist at time t

    Returns:
        (x_d, xi_d); for a moving target xi_d is the true base twist, which the
        simulator withholds from the controller
    """
    return spec.evaluate(t)
