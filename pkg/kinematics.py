"""
Serial-chain kinematics with dual quaternions

Links follow the standard (distal) Denavit-Hartenberg convention:
x_i^{i-1}(q_i) = rot_z(q_i + theta_offset) trans_z(d) trans_x(a) rot_x(alpha).
All joints are revolute.
"""
import math
import os
from dataclasses import dataclass, field, replace
from typing import List, Sequence, Tuple

import numpy as np
from scipy.spatial.transform import Rotation

from dq_algebra import (
    PureQuaternion, UnitDualQuaternion, UnitQuaternion, _dqconj, _dqmul, _reproject,
    hamilton_minus, pose_from, rotation_of, translation_of,
)
from errors import ChainFileError, ConvergenceError, DimensionMismatchError

CHAIN_HEADER = 'dh-standard'

_K_HAT = np.array([0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0])

# vec6 -> vec8 embedding, zero rows at both real parts
E8 = np.zeros((8, 6))
E8[1:4, 0:3] = np.eye(3)
E8[5:8, 3:6] = np.eye(3)


@dataclass(frozen=True)
class DHLink:
    theta_offset: float
    d: float
    a: float
    alpha: float

    def __post_init__(self):
        for name in ('theta_offset', 'd', 'a', 'alpha'):
            if not math.isfinite(getattr(self, name)):
                raise ChainFileError(f"DH parameter {name} must be finite")

    def fixed_part(self) -> np.ndarray:
        """trans_z(d) trans_x(a) rot_x(alpha) as 8 coefficients"""
        half = 0.5 * self.alpha
        rot_x = UnitQuaternion(math.cos(half), math.sin(half), 0.0, 0.0)
        return pose_from(rot_x, PureQuaternion(self.a, 0.0, self.d)).coeffs


@dataclass(frozen=True)
class SerialChain:
    links: Tuple[DHLink, ...]
    base_pose: UnitDualQuaternion = field(default_factory=UnitDualQuaternion.identity)
    effector_pose: UnitDualQuaternion = field(default_factory=UnitDualQuaternion.identity)
    name: str = 'chain'

    def __post_init__(self):
        if len(self.links) < 1:
            raise ChainFileError("a chain needs at least one link")
        object.__setattr__(self, 'links', tuple(self.links))
        object.__setattr__(self, '_fixed', tuple(link.fixed_part() for link in self.links))

    @property
    def n(self) -> int:
        return len(self.links)

    def with_base(self, base_pose: UnitDualQuaternion) -> 'SerialChain':
        return replace(self, base_pose=base_pose)


def load_chain(path: str, base_pose: UnitDualQuaternion = None,
               effector_pose: UnitDualQuaternion = None) -> SerialChain:
    """
    Read a chain file

    The first non-comment line must be `dh-standard`; every following line is
    `theta_offset d a alpha` (radians, metres). `#` starts a comment.
    """
    if not os.path.isfile(path):
        raise ChainFileError("chain file not found", path=path)

    links: List[DHLink] = []
    header_seen = False
    with open(path, 'r', encoding='utf-8') as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.split('#', 1)[0].strip()
            if not line:
                continue
            if not header_seen:
                if line != CHAIN_HEADER:
                    raise ChainFileError(f"expected header '{CHAIN_HEADER}'", line=lineno, path=path)
                header_seen = True
                continue
            parts = line.split()
            if len(parts) != 4:
                raise ChainFileError(f"expected 4 values 'theta_offset d a alpha', got {len(parts)}",
                                     line=lineno, path=path)
            try:
                values = [float(p) for p in parts]
            except ValueError:
                raise ChainFileError("non-numeric DH value", line=lineno, path=path)
            try:
                links.append(DHLink(*values))
            except ChainFileError as e:
                raise ChainFileError(e.message, line=lineno, path=path)

    if not header_seen:
        raise ChainFileError("empty chain file", path=path)
    if not links:
        raise ChainFileError("chain file has no links", path=path)

    return SerialChain(
        links=tuple(links),
        base_pose=base_pose or UnitDualQuaternion.identity(),
        effector_pose=effector_pose or UnitDualQuaternion.identity(),
        name=os.path.splitext(os.path.basename(path))[0],
    )


def _joint_vector(chain: SerialChain, q) -> np.ndarray:
    q = np.asarray(getattr(q, 'q', q), dtype=float)
    if q.shape != (chain.n,):
        raise DimensionMismatchError(f"chain has {chain.n} joints, got q of shape {q.shape}")
    return q


def _frames(chain: SerialChain, q: np.ndarray) -> List[np.ndarray]:
    """Frames 0..n as coefficient arrays, base offset included."""
    frames = [np.asarray(chain.base_pose.coeffs, dtype=float)]
    current = frames[0]
    for qi, link, fixed in zip(q, chain.links, chain._fixed):
        half = 0.5 * (qi + link.theta_offset)
        rot_z = np.array([math.cos(half), 0.0, 0.0, math.sin(half), 0.0, 0.0, 0.0, 0.0])
        current = _dqmul(_dqmul(current, rot_z), fixed)
        frames.append(current)
    return frames


def fkm(chain: SerialChain, q) -> UnitDualQuaternion:
    q = _joint_vector(chain, q)
    x = _dqmul(_frames(chain, q)[-1], chain.effector_pose.coeffs)
    return UnitDualQuaternion.from_array(_reproject(x))


def _jacobian_from_frames(frames: List[np.ndarray]) -> np.ndarray:
    n = len(frames) - 1
    J = np.empty((6, n))
    for i in range(n):
        x = frames[i]
        j = _dqmul(_dqmul(x, _K_HAT), _dqconj(x))
        J[:3, i] = j[1:4]
        J[3:, i] = j[5:8]
    return J


def jacobian(chain: SerialChain, q) -> np.ndarray:
    """
    Analytical Jacobian

    Column i is vec6 of the twist of joint i in the inertial frame, so
    J qdot = vec6(xi) with xi = w + e(pdot + p x w).
    """
    q = _joint_vector(chain, q)
    return _jacobian_from_frames(_frames(chain, q))


def fkm_and_jacobian(chain: SerialChain, q) -> Tuple[UnitDualQuaternion, np.ndarray]:
    """Both from a single pass over the chain."""
    q = _joint_vector(chain, q)
    frames = _frames(chain, q)
    x = _dqmul(frames[-1], chain.effector_pose.coeffs)
    return UnitDualQuaternion.from_array(_reproject(x)), _jacobian_from_frames(frames)


def jacobian_r8(chain: SerialChain, q, x: UnitDualQuaternion = None, J: np.ndarray = None) -> np.ndarray:
    """
    8xn Jacobian with vec8(xdot) = J_R8 qdot

    Args:
        x: Pose used in the Hamilton operator; fkm(chain, q) when omitted
        J: Precomputed analytical Jacobian
    """
    if J is None:
        J = jacobian(chain, q)
    if x is None:
        x = fkm(chain, q)
    return 0.5 * hamilton_minus(x) @ E8 @ J


def skew(v) -> np.ndarray:
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])


def geometric_jacobian(chain: SerialChain, q, x: UnitDualQuaternion = None, J: np.ndarray = None) -> np.ndarray:
    """Geometric Jacobian with rows ordered [v; w]"""
    if J is None:
        J = jacobian(chain, q)
    if x is None:
        x = fkm(chain, q)
    p = translation_of(x).coeffs[1:]
    J_w = J[:3]
    J_v = J[3:] - skew(p) @ J_w
    return np.vstack((J_v, J_w))


def translation_jacobian(chain: SerialChain, q, x: UnitDualQuaternion = None, J: np.ndarray = None) -> np.ndarray:
    return geometric_jacobian(chain, q, x=x, J=J)[:3]


def rotation_matrix(r: UnitQuaternion) -> np.ndarray:
    w, x, y, z = r.coeffs
    return Rotation.from_quat([x, y, z, w]).as_matrix()


def inverse_kinematics(chain: SerialChain, target: UnitDualQuaternion, q_seed: Sequence[float],
                       tol: float = 1e-10, max_iter: int = 1000,
                       clamp_pos_err: float = 0.1, clamp_rot_err: float = np.pi / 6) -> np.ndarray:
    """
    Damped least-squares position and orientation solve

    Args:
        target: Desired end-effector pose
        q_seed: Starting joint vector
        tol: Stop when position and angle errors are both below it

    Returns:
        Joint vector whose fkm matches target

    Raises:
        ConvergenceError: tolerance not reached within max_iter
    """
    q = np.array(_joint_vector(chain, q_seed), dtype=float)
    p_target = translation_of(target).coeffs[1:]
    R_target = rotation_matrix(rotation_of(target))

    err_scalar = np.inf
    for _ in range(max_iter):
        x, J = fkm_and_jacobian(chain, q)
        p = translation_of(x).coeffs[1:]
        pos_err = p_target - p
        rot_err = Rotation.from_matrix(R_target @ rotation_matrix(rotation_of(x)).T).as_rotvec()
        pos_val = float(np.linalg.norm(pos_err))
        rot_val = float(np.linalg.norm(rot_err))
        err_scalar = max(pos_val, rot_val)
        if err_scalar < tol:
            return q

        if pos_val >= clamp_pos_err:
            pos_err = clamp_pos_err * pos_err / pos_val
        if rot_val >= clamp_rot_err:
            rot_err = clamp_rot_err * rot_err / rot_val

        J_G = geometric_jacobian(chain, q, x=x, J=J)
        damper = (1e-3 * err_scalar + 1e-9) * np.eye(6)
        q = q + J_G.T @ np.linalg.solve(J_G @ J_G.T + damper, np.concatenate((pos_err, rot_err)))

    raise ConvergenceError(f"inverse kinematics stopped at error {err_scalar:.3g} after {max_iter} iterations")
