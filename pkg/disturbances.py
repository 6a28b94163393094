"""
Twist and pose disturbance generators

Every sample is a pure dual quaternion in the inertial frame, laid out as
vec6 (angular i, j, k then dual i, j, k). Signals are deterministic functions
of their parameters and seed.
"""
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy.integrate import trapezoid

from dq_algebra import PureDualQuaternion
from errors import ConstraintViolationError, HorizonError

KIND_ZERO = 'zero'
KIND_CONSTANT = 'constant'
KIND_SINUSOID = 'sinusoid'
KIND_TRIANGLE_BASE = 'triangle_base'
KIND_BAND_LIMITED = 'seeded_band_limited'

DISTURBANCE_KINDS = (KIND_ZERO, KIND_CONSTANT, KIND_SINUSOID, KIND_TRIANGLE_BASE, KIND_BAND_LIMITED)

MAX_COMPONENTS = 8
HORIZON_SLACK = 1e-9


def square_wave(t: float, period: float) -> float:
    """+1 on the first half of every period, -1 on the second"""
    phase = (t / period) % 1.0
    return 1.0 if phase < 0.5 else -1.0


def triangle_wave(t: float, period: float) -> float:
    """Integral of square_wave: rises to period/2, returns to zero each period"""
    phase = (t / period) % 1.0
    if phase < 0.5:
        return phase * period
    return (1.0 - phase) * period


@dataclass(frozen=True)
class DisturbanceSignal:
    kind: str = KIND_ZERO
    amplitude: Tuple[float, ...] = (0.0,) * 6
    period: float = 1.0
    periods: Optional[Tuple[float, ...]] = None
    seed: int = 0
    horizon: float = math.inf
    band: Tuple[float, float] = (0.5, 2.0)
    components: int = 4
    _frequencies: np.ndarray = field(default=None, init=False, repr=False, compare=False)
    _phases: np.ndarray = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in DISTURBANCE_KINDS:
            raise ConstraintViolationError(f"unknown disturbance kind '{self.kind}'")
        amplitude = tuple(float(a) for a in self.amplitude)
        if len(amplitude) != 6:
            raise ConstraintViolationError(f"disturbance amplitude needs 6 values, got {len(amplitude)}")
        object.__setattr__(self, 'amplitude', amplitude)
        if not self.period > 0.0:
            raise ConstraintViolationError(f"disturbance period must be positive, got {self.period!r}")
        if self.periods is not None:
            periods = tuple(float(p) for p in self.periods)
            if not periods or any(p <= 0.0 for p in periods):
                raise ConstraintViolationError("disturbance periods must be positive")
            object.__setattr__(self, 'periods', periods)
        if self.kind == KIND_BAND_LIMITED:
            low, high = self.band
            if not 0.0 < low <= high:
                raise ConstraintViolationError(f"band must satisfy 0 < low <= high, got {self.band!r}")
            if not 1 <= self.components <= MAX_COMPONENTS:
                raise ConstraintViolationError(f"components must be in 1..{MAX_COMPONENTS}, got {self.components}")
            rng = np.random.default_rng(self.seed)
            freqs = rng.uniform(low, high, size=(6, self.components))
            phases = rng.uniform(0.0, 2.0 * math.pi, size=(6, self.components))
            freqs.setflags(write=False)
            phases.setflags(write=False)
            object.__setattr__(self, '_frequencies', freqs)
            object.__setattr__(self, '_phases', phases)

    def component_period(self, i: int) -> float:
        if self.periods is None:
            return self.period
        return self.periods[i % len(self.periods)]

    def check_nyquist(self, dt: float):
        """Band-limited content must stay below 0.5/dt"""
        if self.kind == KIND_BAND_LIMITED and self.band[1] >= 0.5 / dt:
            raise ConstraintViolationError(
                f"band upper edge {self.band[1]} Hz is not below the Nyquist rate {0.5 / dt} Hz")

    def values(self, t: float) -> np.ndarray:
        """Sample as a vec6 array"""
        if t < -HORIZON_SLACK or t > self.horizon + HORIZON_SLACK:
            raise HorizonError(f"t={t!r} outside the disturbance horizon [0, {self.horizon}]")
        a = np.asarray(self.amplitude)
        if self.kind == KIND_ZERO:
            return np.zeros(6)
        if self.kind == KIND_CONSTANT:
            return a.copy()
        if self.kind == KIND_SINUSOID:
            return np.array([a[i] * math.sin(2.0 * math.pi * t / self.component_period(i)) for i in range(6)])
        if self.kind == KIND_TRIANGLE_BASE:
            return np.array([a[i] * square_wave(t, self.component_period(i)) for i in range(6)])
        waves = np.sin(2.0 * math.pi * self._frequencies * t + self._phases)
        return a * waves.sum(axis=1) / self.components


def sample(sig: DisturbanceSignal, t: float) -> PureDualQuaternion:
    return PureDualQuaternion.from_vec6(sig.values(t))


ZERO_SIGNAL = DisturbanceSignal()


@dataclass(frozen=True)
class DisturbanceEnergy:
    w_rot: float
    w_dual: float
    c_rot: float
    c_dual: float

    @property
    def rotational(self) -> float:
        return self.w_rot + self.c_rot

    @property
    def translational(self) -> float:
        return self.w_dual + self.c_dual


def signal_energy(sig: DisturbanceSignal, T: float, dt: float) -> Tuple[float, float]:
    """Trapezoidal integrals of the squared rotational and dual norms over [0, T]"""
    if not dt > 0.0:
        raise ConstraintViolationError(f"dt must be positive, got {dt!r}")
    steps = int(math.floor(T / dt + 1e-9))
    t = np.arange(steps + 1) * dt
    samples = np.array([sig.values(ti) for ti in t])
    rot = np.sum(samples[:, :3] ** 2, axis=1)
    dual = np.sum(samples[:, 3:] ** 2, axis=1)
    return float(trapezoid(rot, t)), float(trapezoid(dual, t))


def l2_norm_squared(v_w: DisturbanceSignal, v_c: DisturbanceSignal, T: float, dt: float) -> DisturbanceEnergy:
    w_rot, w_dual = signal_energy(v_w, T, dt)
    c_rot, c_dual = signal_energy(v_c, T, dt)
    return DisturbanceEnergy(w_rot=w_rot, w_dual=w_dual, c_rot=c_rot, c_dual=c_dual)
