"""
SVD-based pseudoinverses
"""
from dataclasses import dataclass

import numpy as np

DEFAULT_RANK_TOL = 1e-8


@dataclass(frozen=True)
class SvdFactors:
    """J = M S N^T with singular values in nonincreasing order"""
    M: np.ndarray
    singular_values: np.ndarray
    N: np.ndarray
    rank: int

    @property
    def sigma_min(self) -> float:
        if self.singular_values.size == 0:
            return 0.0
        return float(self.singular_values[-1])

    def reconstruct(self) -> np.ndarray:
        m, n = self.M.shape[0], self.N.shape[0]
        S = np.zeros((m, n))
        k = self.singular_values.size
        S[:k, :k] = np.diag(self.singular_values)
        return self.M @ S @ self.N.T

    def pinv(self) -> np.ndarray:
        r = self.rank
        return self.N[:, :r] @ np.diag(1.0 / self.singular_values[:r]) @ self.M[:, :r].T


def svd_factors(J: np.ndarray, rank_tol: float = DEFAULT_RANK_TOL) -> SvdFactors:
    M, s, Nt = np.linalg.svd(J, full_matrices=True)
    if s.size == 0 or s[0] == 0.0:
        rank = 0
    else:
        rank = int(np.sum(s > rank_tol * s[0]))
    return SvdFactors(M=M, singular_values=s, N=Nt.T, rank=rank)


def pinv(Jm: np.ndarray, rank_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse; singular values <= rank_tol * sigma_1 count as zero"""
    if rank_tol < 0:
        raise ValueError("rank_tol must be nonnegative")
    return svd_factors(Jm, rank_tol).pinv()


def sigma_min(J: np.ndarray) -> float:
    s = np.linalg.svd(J, compute_uv=False)
    return float(s[-1]) if s.size else 0.0


def alsi_damping(sigma: float, eps: float, lambda_max: float) -> float:
    """Squared damping factor lambda^2; zero outside the eps neighbourhood"""
    if sigma >= eps:
        return 0.0
    return (1.0 - (sigma / eps) ** 2) * lambda_max ** 2


def alsi_pinv(J: np.ndarray, eps: float, lambda_max: float, rank_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """
    Adaptive damped least-squares inverse

    J^T (J J^T + lambda^2 I)^-1 with lambda^2 = (1 - (sigma_min/eps)^2) lambda_max^2
    when sigma_min < eps, plain pseudoinverse otherwise.
    """
    if eps <= 0 or lambda_max <= 0:
        raise ValueError("eps and lambda_max must be positive")
    lam2 = alsi_damping(sigma_min(J), eps, lambda_max)
    if lam2 == 0.0:
        return pinv(J, rank_tol)
    m = J.shape[0]
    return J.T @ np.linalg.inv(J @ J.T + lam2 * np.eye(m))
