"""
Fixed-step closed-loop kinematic simulation

The true end-effector pose is integrated on the unit dual quaternion group:
x <- exp((dt/2) xi_tot) x with xi_tot = vec6^-1(J qdot) + v_w + v_c, while the
joints follow explicit Euler. Controllers see the disturbed pose.
"""
import math
import time
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from pubsub import pub

import events  # noqa: F401  registers the lifecycle listeners
from controllers import BaseController, ControlContext, ControllerSpec, create_controller
from controllers.pseudoinverse import sigma_min as jacobian_sigma_min
from disturbances import ZERO_SIGNAL, DisturbanceSignal
from dq_algebra import PureDualQuaternion, UnitDualQuaternion, _dqmul, _exp_coeffs, vec6
from error_metrics import error_function, spatial_error
from errors import ConstraintViolationError, SimulationAbortedError
from kinematics import SerialChain, fkm, fkm_and_jacobian
from trajectories import TrajectorySpec, desired_trajectory

DEFAULT_DT = 0.005


@dataclass(frozen=True)
class DisturbancePair:
    v_w: DisturbanceSignal = ZERO_SIGNAL
    v_c: DisturbanceSignal = ZERO_SIGNAL


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    chain: SerialChain
    q0: np.ndarray
    controller: ControllerSpec
    trajectory: TrajectorySpec
    disturbances: DisturbancePair = field(default_factory=DisturbancePair)
    dt: float = DEFAULT_DT
    T: float = 5.0
    seed: int = 0
    converge_tol: Optional[float] = None
    sigma_bound: bool = True

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ConstraintViolationError(f"dt must be positive, got {self.dt!r}")
        if not self.T >= self.dt:
            raise ConstraintViolationError(f"T must be at least dt, got T={self.T!r}, dt={self.dt!r}")
        q0 = np.array(self.q0, dtype=float)
        if q0.shape != (self.chain.n,):
            raise ConstraintViolationError(f"q0 needs {self.chain.n} values, got {q0.size}")
        object.__setattr__(self, 'q0', q0)
        self.disturbances.v_w.check_nyquist(self.dt)
        self.disturbances.v_c.check_nyquist(self.dt)

    @property
    def steps(self) -> int:
        return int(math.floor(self.T / self.dt + 1e-9))


@dataclass(frozen=True)
class SimState:
    k: int
    t: float
    q: np.ndarray
    x: UnitDualQuaternion


@dataclass
class StepRecord:
    t: float
    q: np.ndarray
    u: np.ndarray
    x: np.ndarray
    xd: np.ndarray
    xi_d: np.ndarray
    z: np.ndarray
    O: np.ndarray
    T: np.ndarray
    branch: str
    sigma_min: float
    kappa_s: float
    s_bar: int
    gamma_norm: float
    vs_norm: float
    vw: np.ndarray
    vc: np.ndarray
    residual: np.ndarray
    target_twist: np.ndarray
    twist: np.ndarray

    @property
    def err_norm(self) -> float:
        return float(np.linalg.norm(self.z))

    @property
    def u_norm(self) -> float:
        return float(np.linalg.norm(self.u))


@dataclass
class SimTrace:
    """Per-step log of a run, one row per record"""
    scenario: str
    controller: str
    t: np.ndarray
    q: np.ndarray
    u: np.ndarray
    x: np.ndarray
    xd: np.ndarray
    xi_d: np.ndarray
    z: np.ndarray
    O: np.ndarray
    T: np.ndarray
    branch: List[str]
    sigma_min: np.ndarray
    kappa_s: np.ndarray
    s_bar: np.ndarray
    gamma_norm: np.ndarray
    vs_norm: np.ndarray
    vw: np.ndarray
    vc: np.ndarray
    residual: np.ndarray
    target_twist: np.ndarray

    @classmethod
    def from_records(cls, scenario: str, controller: str, records: List[StepRecord]) -> 'SimTrace':
        def stack(name):
            return np.array([getattr(r, name) for r in records])
        return cls(
            scenario=scenario, controller=controller,
            t=stack('t'), q=stack('q'), u=stack('u'), x=stack('x'), xd=stack('xd'),
            xi_d=stack('xi_d'), z=stack('z'), O=stack('O'), T=stack('T'),
            branch=[r.branch for r in records],
            sigma_min=stack('sigma_min'), kappa_s=stack('kappa_s'), s_bar=stack('s_bar'),
            gamma_norm=stack('gamma_norm'), vs_norm=stack('vs_norm'),
            vw=stack('vw'), vc=stack('vc'), residual=stack('residual'),
            target_twist=stack('target_twist'),
        )

    def __len__(self) -> int:
        return len(self.t)

    @property
    def err_norm(self) -> np.ndarray:
        return np.linalg.norm(self.z, axis=1)

    @property
    def u_norm(self) -> np.ndarray:
        return np.linalg.norm(self.u, axis=1)

    @property
    def vw_effective(self) -> np.ndarray:
        """Sampled twist disturbance plus the part of the command the arm could not realize"""
        return self.vw + self.residual

    @property
    def vc_effective(self) -> np.ndarray:
        """Sampled pose disturbance plus the unknown target motion"""
        return self.vc + self.target_twist


def initial_state(config: ScenarioConfig) -> SimState:
    return SimState(k=0, t=0.0, q=config.q0.copy(), x=fkm(config.chain, config.q0))


def evaluate(state: SimState, chain: SerialChain, controller: BaseController,
             trajectory: TrajectorySpec, signals: DisturbancePair) -> StepRecord:
    """Control input and every logged quantity at the current state"""
    x_d, xi_d_true = desired_trajectory(trajectory, state.t)
    if trajectory.feedforward_known:
        xi_d_ctrl = xi_d_true
    else:
        xi_d_ctrl = PureDualQuaternion.zero()

    _, J = fkm_and_jacobian(chain, state.q)
    error = error_function(spatial_error(state.x, x_d))
    ctx = ControlContext(chain=chain, q=state.q, x=state.x, x_d=x_d, xi_d=xi_d_ctrl, J=J, error=error)
    out = controller.compute(ctx)

    if not np.all(np.isfinite(out.qdot)):
        raise SimulationAbortedError(state.k, state.t, "non-finite control input")

    if trajectory.feedforward_known:
        target_twist = np.zeros(6)
    else:
        x_t = error.x_tilde
        target_twist = -vec6(x_t * xi_d_true * x_t.conjugate())

    vw = signals.v_w.values(state.t)
    vc = signals.v_c.values(state.t)

    return StepRecord(
        t=state.t,
        q=state.q.copy(),
        u=np.array(out.qdot, dtype=float),
        x=np.array(state.x.coeffs),
        xd=np.array(x_d.coeffs),
        xi_d=vec6(xi_d_true),
        z=np.array(error.z_tilde.coeffs),
        O=error.O.coeffs[1:].copy(),
        T=error.T.coeffs[1:].copy(),
        branch=error.branch,
        sigma_min=jacobian_sigma_min(J),
        kappa_s=float(out.kappa_s),
        s_bar=int(out.s_bar),
        gamma_norm=out.gamma_norm,
        vs_norm=float(np.linalg.norm(out.v_s)),
        vw=vw,
        vc=vc,
        residual=np.array(out.residual, dtype=float),
        target_twist=target_twist,
        twist=J @ out.qdot,
    )


def integrate(state: SimState, record: StepRecord, dt: float) -> SimState:
    """One explicit step of the joints and one exponential step of the pose"""
    xi_tot = record.twist + record.vw + record.vc
    half = 0.5 * dt * xi_tot
    x_next = _dqmul(_exp_coeffs(half[:3], half[3:]), state.x.coeffs)
    k = state.k + 1
    return SimState(k=k, t=k * dt, q=state.q + dt * record.u, x=UnitDualQuaternion.from_array(x_next))


def step(state: SimState, controller: BaseController, signals: DisturbancePair, dt: float,
         chain: SerialChain, trajectory: TrajectorySpec):
    """
    Advance the closed loop by one sample

    Returns:
        (next state, record of the current sample)
    """
    record = evaluate(state, chain, controller, trajectory, signals)
    return integrate(state, record, dt), record


def run(config: ScenarioConfig) -> SimTrace:
    controller = create_controller(config.controller)
    state = initial_state(config)
    steps = config.steps
    records: List[StepRecord] = []

    pub.sendMessage('simulation.started', scenario=config.name, controller=controller.kind, steps=steps + 1)
    started = time.monotonic()
    in_region = False
    try:
        for k in range(steps + 1):
            record = evaluate(state, config.chain, controller, config.trajectory, config.disturbances)
            records.append(record)
            if record.kappa_s > 0.0 and not in_region:
                pub.sendMessage('simulation.singular_region', scenario=config.name,
                                controller=controller.kind, t=record.t, sigma_min=record.sigma_min)
            in_region = record.kappa_s > 0.0
            if k < steps:
                state = integrate(state, record, config.dt)
    except SimulationAbortedError as e:
        pub.sendMessage('simulation.aborted', scenario=config.name, controller=controller.kind,
                        error=str(e))
        raise

    trace = SimTrace.from_records(config.name, controller.kind, records)
    pub.sendMessage('simulation.finished', scenario=config.name, controller=controller.kind,
                    steps=len(trace), duration=time.monotonic() - started,
                    min_sigma=float(np.min(trace.sigma_min)), final_error=float(trace.err_norm[-1]))
    return trace
