"""
Quaternion and dual quaternion algebra

Coefficient order is fixed everywhere: quaternions as (1, i, j, k) and dual
quaternions as (1, i, j, k, e, ei, ej, ek). vec6 keeps the imaginary parts of
the primary then the dual part.

Values are immutable; the coefficient arrays are marked read-only.
"""
import math
from typing import Union

import numpy as np

from errors import ConstraintViolationError

RENORMALIZATION_TOL = 1e-9
# Poses built from user input may drift this far before they are rejected
POSE_VALIDATION_TOL = 1e-6
PURITY_TOL = 1e-9
# Below this rotation angle exp/log switch to their Taylor series
SERIES_ANGLE = 1e-4

C8 = np.diag([1.0, -1.0, -1.0, -1.0, 1.0, -1.0, -1.0, -1.0])


def _frozen(arr) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


def _qmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    return np.array([
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    ])


def _qconj(a: np.ndarray) -> np.ndarray:
    return np.array([a[0], -a[1], -a[2], -a[3]])


def _dqmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of two 8-coefficient arrays; the e^2 term never appears."""
    primary = _qmul(a[:4], b[:4])
    dual = _qmul(a[:4], b[4:]) + _qmul(a[4:], b[:4])
    return np.concatenate((primary, dual))


def _dqconj(a: np.ndarray) -> np.ndarray:
    return a * np.array([1.0, -1.0, -1.0, -1.0, 1.0, -1.0, -1.0, -1.0])


def _reproject(arr: np.ndarray) -> np.ndarray:
    """Normalize the primary part and make the dual part orthogonal to it."""
    primary = arr[:4]
    n = np.linalg.norm(primary)
    if n == 0.0 or not np.isfinite(n):
        raise ConstraintViolationError("cannot project a dual quaternion with zero primary part")
    primary = primary / n
    dual = arr[4:] / n
    dual = dual - np.dot(dual, primary) * primary
    return np.concatenate((primary, dual))


def _pose_drift(arr: np.ndarray) -> float:
    return max(abs(np.linalg.norm(arr[:4]) - 1.0), abs(float(np.dot(arr[:4], arr[4:]))))


class Quaternion:
    """Real quaternion w + x i + y j + z k"""

    __slots__ = ('_c',)

    def __init__(self, w: float = 0.0, x: float = 0.0, y: float = 0.0, z: float = 0.0):
        self._c = _frozen([w, x, y, z])

    @classmethod
    def from_array(cls, coeffs) -> 'Quaternion':
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (4,):
            raise ConstraintViolationError(f"quaternion needs 4 coefficients, got shape {coeffs.shape}")
        return cls(*coeffs)

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def w(self) -> float:
        return float(self._c[0])

    @property
    def x(self) -> float:
        return float(self._c[1])

    @property
    def y(self) -> float:
        return float(self._c[2])

    @property
    def z(self) -> float:
        return float(self._c[3])

    @property
    def real(self) -> float:
        return float(self._c[0])

    @property
    def imag(self) -> 'PureQuaternion':
        return PureQuaternion(*self._c[1:])

    def conjugate(self) -> 'Quaternion':
        return Quaternion(*_qconj(self._c))

    def norm(self) -> float:
        return float(np.linalg.norm(self._c))

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return Quaternion(*_qmul(self._c, other._c))
        if isinstance(other, (int, float, np.floating)):
            return Quaternion(*(self._c * float(other)))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, np.floating)):
            return Quaternion(*(self._c * float(other)))
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, Quaternion):
            return Quaternion(*(self._c + other._c))
        if isinstance(other, (int, float, np.floating)):
            return Quaternion(self.w + float(other), self.x, self.y, self.z)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Quaternion):
            return Quaternion(*(self._c - other._c))
        if isinstance(other, (int, float, np.floating)):
            return Quaternion(self.w - float(other), self.x, self.y, self.z)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Quaternion(*(-self._c))

    def __eq__(self, other):
        if not isinstance(other, Quaternion):
            return NotImplemented
        return bool(np.array_equal(self._c, other._c))

    def __hash__(self):
        return hash(self._c.tobytes())

    def __repr__(self):
        return f"{type(self).__name__}({self.w!r}, {self.x!r}, {self.y!r}, {self.z!r})"


class PureQuaternion(Quaternion):
    """Quaternion with real part exactly zero"""

    __slots__ = ()

    def __init__(self, x: float = 0.0, y: float = 0.0, z: float = 0.0):
        self._c = _frozen([0.0, x, y, z])

    @classmethod
    def from_array(cls, coeffs) -> 'PureQuaternion':
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (3,):
            raise ConstraintViolationError(f"pure quaternion needs 3 coefficients, got shape {coeffs.shape}")
        return cls(*coeffs)


class UnitQuaternion(Quaternion):
    """Quaternion of norm one, within RENORMALIZATION_TOL"""

    __slots__ = ()

    def __init__(self, w: float = 1.0, x: float = 0.0, y: float = 0.0, z: float = 0.0):
        c = np.array([w, x, y, z], dtype=float)
        n = np.linalg.norm(c)
        if abs(n - 1.0) > RENORMALIZATION_TOL:
            raise ConstraintViolationError(f"unit quaternion expected, norm is {n!r}")
        self._c = _frozen(c)

    @classmethod
    def normalized(cls, q: Union[Quaternion, np.ndarray]) -> 'UnitQuaternion':
        c = q.coeffs if isinstance(q, Quaternion) else np.asarray(q, dtype=float)
        n = np.linalg.norm(c)
        if n == 0.0:
            raise ConstraintViolationError("cannot normalize the zero quaternion")
        return cls(*(c / n))


class DualQuaternion:
    """Dual quaternion primary + e dual with e^2 = 0"""

    __slots__ = ('_c',)

    def __init__(self, primary: Quaternion = None, dual: Quaternion = None):
        p = primary.coeffs if primary is not None else np.zeros(4)
        d = dual.coeffs if dual is not None else np.zeros(4)
        self._c = _frozen(np.concatenate((p, d)))

    @classmethod
    def from_array(cls, coeffs) -> 'DualQuaternion':
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (8,):
            raise ConstraintViolationError(f"dual quaternion needs 8 coefficients, got shape {coeffs.shape}")
        obj = DualQuaternion.__new__(DualQuaternion)
        obj._c = _frozen(coeffs)
        return obj

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def primary(self) -> Quaternion:
        return Quaternion(*self._c[:4])

    @property
    def dual(self) -> Quaternion:
        return Quaternion(*self._c[4:])

    def conjugate(self) -> 'DualQuaternion':
        return DualQuaternion.from_array(_dqconj(self._c))

    def norm(self) -> float:
        """Primary part of sqrt(h h*)"""
        return float(np.linalg.norm(self._c[:4]))

    def __mul__(self, other):
        if isinstance(other, DualQuaternion):
            return DualQuaternion.from_array(_dqmul(self._c, other._c))
        if isinstance(other, (int, float, np.floating)):
            return DualQuaternion.from_array(self._c * float(other))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, np.floating)):
            return DualQuaternion.from_array(self._c * float(other))
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, DualQuaternion):
            return DualQuaternion.from_array(self._c + other._c)
        if isinstance(other, (int, float, np.floating)):
            c = self._c.copy()
            c[0] += float(other)
            return DualQuaternion.from_array(c)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, DualQuaternion):
            return DualQuaternion.from_array(self._c - other._c)
        if isinstance(other, (int, float, np.floating)):
            c = self._c.copy()
            c[0] -= float(other)
            return DualQuaternion.from_array(c)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return DualQuaternion.from_array(-self._c)

    def __eq__(self, other):
        if not isinstance(other, DualQuaternion):
            return NotImplemented
        return bool(np.array_equal(self._c, other._c))

    def __hash__(self):
        return hash(self._c.tobytes())

    def __repr__(self):
        return f"{type(self).__name__}({self.primary!r}, {self.dual!r})"


class PureDualQuaternion(DualQuaternion):
    """Twist: both real parts exactly zero"""

    __slots__ = ()

    def __init__(self, primary: Quaternion = None, dual: Quaternion = None):
        p = primary.coeffs if primary is not None else np.zeros(4)
        d = dual.coeffs if dual is not None else np.zeros(4)
        c = np.concatenate((p, d))
        _check_pure(c[0], c)
        _check_pure(c[4], c)
        c[0] = 0.0
        c[4] = 0.0
        self._c = _frozen(c)

    @classmethod
    def from_vec6(cls, v) -> 'PureDualQuaternion':
        v = np.asarray(v, dtype=float)
        if v.shape != (6,):
            raise ConstraintViolationError(f"vec6 needs 6 coefficients, got shape {v.shape}")
        obj = cls.__new__(cls)
        obj._c = _frozen([0.0, v[0], v[1], v[2], 0.0, v[3], v[4], v[5]])
        return obj

    @classmethod
    def zero(cls) -> 'PureDualQuaternion':
        return cls.from_vec6(np.zeros(6))


class UnitDualQuaternion(DualQuaternion):
    """Pose r + e (1/2) p r"""

    __slots__ = ()

    def __init__(self, primary: Quaternion = None, dual: Quaternion = None):
        p = primary.coeffs if primary is not None else np.array([1.0, 0.0, 0.0, 0.0])
        d = dual.coeffs if dual is not None else np.zeros(4)
        self._c = _frozen(_validated_pose(np.concatenate((p, d))))

    @classmethod
    def from_array(cls, coeffs) -> 'UnitDualQuaternion':
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (8,):
            raise ConstraintViolationError(f"pose needs 8 coefficients, got shape {coeffs.shape}")
        obj = cls.__new__(cls)
        obj._c = _frozen(_validated_pose(coeffs))
        return obj

    @classmethod
    def identity(cls) -> 'UnitDualQuaternion':
        obj = cls.__new__(cls)
        obj._c = _frozen([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])
        return obj

    def inverse(self) -> 'UnitDualQuaternion':
        obj = UnitDualQuaternion.__new__(UnitDualQuaternion)
        obj._c = _frozen(_dqconj(self._c))
        return obj

    def compose(self, other: 'UnitDualQuaternion') -> 'UnitDualQuaternion':
        """Product of two poses, reprojected when drift exceeds tolerance."""
        return UnitDualQuaternion.from_array(_dqmul(self._c, other._c))


Pose = UnitDualQuaternion
Twist = PureDualQuaternion


def _check_pure(real: float, c: np.ndarray):
    if abs(real) > PURITY_TOL * max(1.0, float(np.max(np.abs(c)))):
        raise ConstraintViolationError(f"pure value expected, real part is {real!r}")


def _validated_pose(c: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(c)):
        raise ConstraintViolationError("pose has non-finite coefficients")
    drift = _pose_drift(c)
    if drift > POSE_VALIDATION_TOL:
        raise ConstraintViolationError(f"unit dual quaternion expected, constraint drift is {drift!r}")
    if drift > RENORMALIZATION_TOL:
        return _reproject(c)
    return c


def reproject(x: DualQuaternion) -> UnitDualQuaternion:
    """Project any dual quaternion with nonzero primary part onto the unit set."""
    obj = UnitDualQuaternion.__new__(UnitDualQuaternion)
    obj._c = _frozen(_reproject(x.coeffs))
    return obj


def multiply(a, b):
    """Hamilton product of two quaternions or two dual quaternions"""
    if isinstance(a, DualQuaternion) and isinstance(b, DualQuaternion):
        return a * b
    if isinstance(a, Quaternion) and isinstance(b, Quaternion):
        return a * b
    raise ConstraintViolationError("multiply needs operands of the same algebra")


def conjugate(h):
    return h.conjugate()


def norm(h) -> float:
    return h.norm()


def vec3(q: Quaternion) -> np.ndarray:
    _check_pure(q.coeffs[0], q.coeffs)
    return q.coeffs[1:].copy()


def vec3_inv(v) -> PureQuaternion:
    return PureQuaternion.from_array(v)


def vec4(q: Quaternion) -> np.ndarray:
    return q.coeffs.copy()


def vec4_inv(v) -> Quaternion:
    return Quaternion.from_array(v)


def vec6(h: DualQuaternion) -> np.ndarray:
    c = h.coeffs
    _check_pure(c[0], c)
    _check_pure(c[4], c)
    return np.array([c[1], c[2], c[3], c[5], c[6], c[7]])


def vec6_inv(v) -> PureDualQuaternion:
    return PureDualQuaternion.from_vec6(v)


def vec8(h: DualQuaternion) -> np.ndarray:
    return h.coeffs.copy()


def vec8_inv(v) -> DualQuaternion:
    return DualQuaternion.from_array(v)


def _hminus4(b: np.ndarray) -> np.ndarray:
    w, x, y, z = b
    return np.array([
        [w, -x, -y, -z],
        [x, w, z, -y],
        [y, -z, w, x],
        [z, y, -x, w],
    ])


def hamilton_minus(h: DualQuaternion) -> np.ndarray:
    """
    Matrix of right multiplication by h

    Returns:
        8x8 array H with vec8(a h) = H vec8(a)
    """
    c = h.coeffs
    hp = _hminus4(c[:4])
    out = np.zeros((8, 8))
    out[:4, :4] = hp
    out[4:, 4:] = hp
    out[4:, :4] = _hminus4(c[4:])
    return out


def hamilton_minus4(q: Quaternion) -> np.ndarray:
    return _hminus4(q.coeffs)


def inner(u: Quaternion, v: Quaternion) -> float:
    return float(np.dot(vec3(u), vec3(v)))


def cross(u: Quaternion, v: Quaternion) -> PureQuaternion:
    return PureQuaternion(*np.cross(vec3(u), vec3(v)))


def rotation_from_angle_axis(phi: float, n: Quaternion) -> UnitQuaternion:
    axis = vec3(n)
    axis_norm = np.linalg.norm(axis)
    if abs(axis_norm - 1.0) > RENORMALIZATION_TOL:
        raise ConstraintViolationError(f"rotation axis must be unit, norm is {axis_norm!r}")
    half = 0.5 * phi
    s = math.sin(half)
    return UnitQuaternion.normalized(np.array([math.cos(half), s * axis[0], s * axis[1], s * axis[2]]))


def pose_from(r: Quaternion, p: Quaternion) -> UnitDualQuaternion:
    """Pose r + e (1/2) p r"""
    rc = r.coeffs
    dual = 0.5 * _qmul(np.array([0.0, *vec3(p)]), rc)
    return UnitDualQuaternion.from_array(np.concatenate((rc, dual)))


def rotation_of(x: DualQuaternion) -> UnitQuaternion:
    return UnitQuaternion.normalized(x.coeffs[:4])


def translation_of(x: DualQuaternion) -> PureQuaternion:
    """p = 2 D(x) P(x)*"""
    c = x.coeffs
    t = 2.0 * _qmul(c[4:], _qconj(c[:4]))
    return PureQuaternion(t[1], t[2], t[3])


def _series_factors(theta: float):
    """sin(t)/t and (cos(t) - sin(t)/t)/t^2, with their series near zero"""
    if theta < SERIES_ANGLE:
        t2 = theta * theta
        return 1.0 - t2 / 6.0, -1.0 / 3.0 + t2 / 30.0
    s = math.sin(theta) / theta
    return s, (math.cos(theta) - s) / (theta * theta)


def exp_pure(h: DualQuaternion) -> UnitDualQuaternion:
    """
    Exponential of a pure dual quaternion

    Solves x' = h x, x(0) = 1 at t = 1: the primary part is cos|a| + a sin|a|/|a|
    for the rotational half a, the dual part carries the screw translation and
    satisfies the unit constraint by construction.
    """
    v = vec6(h)
    return UnitDualQuaternion.from_array(_exp_coeffs(v[:3], v[3:]))


def _exp_coeffs(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    theta = float(np.linalg.norm(a))
    s, c = _series_factors(theta)
    ab = float(np.dot(a, b))
    primary = np.array([math.cos(theta), *(s * a)])
    dual = np.array([-ab * s, *(s * b + ab * c * a)])
    return np.concatenate((primary, dual))


def log_unit(x: DualQuaternion) -> PureDualQuaternion:
    """
    Logarithm of a pose on the shortest branch

    Returns the pure L with exp_pure(L) equal to x or to -x (the same pose).
    """
    c = np.asarray(x.coeffs, dtype=float)
    if c[0] < 0.0:
        c = -c
    vec = c[1:4]
    theta = math.atan2(float(np.linalg.norm(vec)), float(c[0]))
    s, cf = _series_factors(theta)
    a = vec / s
    ab = -c[4] / s
    b = (c[5:8] - ab * cf * a) / s
    return PureDualQuaternion.from_vec6(np.concatenate((a, b)))
