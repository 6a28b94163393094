"""
H-infinity gain synthesis
"""
import math
from dataclasses import dataclass

from errors import ConstraintViolationError


@dataclass(frozen=True)
class AttenuationSpec:
    """Attenuation levels from disturbances to orientation (O) and translation (T) errors"""
    gamma_O1: float
    gamma_O2: float
    gamma_T1: float
    gamma_T2: float

    def __post_init__(self):
        for name in ('gamma_O1', 'gamma_O2', 'gamma_T1', 'gamma_T2'):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ConstraintViolationError(f"{name} must be positive, got {value!r}")

    @classmethod
    def uniform(cls, gamma_O: float, gamma_T: float) -> 'AttenuationSpec':
        return cls(gamma_O, gamma_O, gamma_T, gamma_T)

    @property
    def gamma_O(self) -> float:
        """Combined orientation bound; equals gamma_O1 when both components match"""
        return (self.gamma_O1 ** -2 + self.gamma_O2 ** -2) ** -0.5 * math.sqrt(2.0)

    @property
    def gamma_T(self) -> float:
        return (self.gamma_T1 ** -2 + self.gamma_T2 ** -2) ** -0.5 * math.sqrt(2.0)


@dataclass(frozen=True)
class GainPair:
    kappa_O: float
    kappa_T: float

    def __post_init__(self):
        if not (self.kappa_O > 0.0 and self.kappa_T > 0.0):
            raise ConstraintViolationError(f"gains must be positive, got {self.kappa_O!r}, {self.kappa_T!r}")


def hinf_gains(spec: AttenuationSpec) -> GainPair:
    """
    Minimum-effort gains meeting the attenuation levels

    kappa_O = (gamma_O1^-2 + gamma_O2^-2)^(1/2), likewise for kappa_T.
    """
    return GainPair(
        kappa_O=math.sqrt(spec.gamma_O1 ** -2 + spec.gamma_O2 ** -2),
        kappa_T=math.sqrt(spec.gamma_T1 ** -2 + spec.gamma_T2 ** -2),
    )


def orientation_gain_bound(alpha1: float, spec: AttenuationSpec) -> float:
    """Smallest admissible kappa_O for Lyapunov weight alpha1"""
    return 1.0 / alpha1 + 0.25 * alpha1 * (spec.gamma_O1 ** -2 + spec.gamma_O2 ** -2)


def translation_gain_bound(alpha2: float, spec: AttenuationSpec) -> float:
    """Smallest admissible kappa_T for Lyapunov weight alpha2"""
    return 2.0 / alpha2 + 0.125 * alpha2 * (spec.gamma_T1 ** -2 + spec.gamma_T2 ** -2)
