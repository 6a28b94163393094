import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.optimize import minimize_scalar

from controllers.gains import AttenuationSpec, hinf_gains, orientation_gain_bound, translation_gain_bound
from controllers.pseudoinverse import alsi_damping, alsi_pinv, pinv, sigma_min, svd_factors
from errors import ConstraintViolationError


def test_uniform_gamma_two_gives_half_root_two():
    gains = hinf_gains(AttenuationSpec.uniform(2.0, 2.0))
    assert abs(gains.kappa_O - math.sqrt(2.0) / 2.0) < 1e-15
    assert abs(gains.kappa_T - math.sqrt(2.0) / 2.0) < 1e-15


def test_combined_bound_of_uniform_spec():
    spec = AttenuationSpec.uniform(2.0, 0.4)
    assert abs(spec.gamma_O - 2.0) < 1e-15
    assert abs(spec.gamma_T - 0.4) < 1e-15


@pytest.mark.parametrize('gammas', [
    (2.0, 2.0, 0.4, 0.4),
    (1.0, 3.0, 0.5, 2.0),
    (0.2, 0.7, 3.5, 3.5),
])
def test_gains_are_the_minimum_of_the_bounds(gammas):
    spec = AttenuationSpec(*gammas)
    gains = hinf_gains(spec)
    f_min = minimize_scalar(lambda a: orientation_gain_bound(a, spec), bounds=(1e-3, 1e3),
                            method='bounded', options={'xatol': 1e-10})
    g_min = minimize_scalar(lambda a: translation_gain_bound(a, spec), bounds=(1e-3, 1e3),
                            method='bounded', options={'xatol': 1e-10})
    assert abs(f_min.fun - gains.kappa_O) < 1e-6
    assert abs(g_min.fun - gains.kappa_T) < 1e-6


def test_attenuation_levels_must_be_positive():
    with pytest.raises(ConstraintViolationError):
        AttenuationSpec(2.0, 2.0, 0.0, 1.0)
    with pytest.raises(ConstraintViolationError):
        AttenuationSpec.uniform(-1.0, 1.0)


def test_pinv_matches_numpy(rng):
    for shape in [(6, 7), (6, 2), (8, 7)]:
        J = rng.normal(size=shape)
        assert_allclose(pinv(J), np.linalg.pinv(J), atol=1e-10)


def _assert_penrose(A, P, atol):
    assert_allclose(A @ P @ A, A, atol=atol)
    assert_allclose(P @ A @ P, P, atol=atol)
    assert_allclose((A @ P).T, A @ P, atol=atol)
    assert_allclose((P @ A).T, P @ A, atol=atol)


@pytest.mark.parametrize('shape', [(6, 7), (6, 2), (8, 7)])
def test_pinv_satisfies_penrose_conditions(rng, shape):
    A = rng.normal(size=shape)
    _assert_penrose(A, pinv(A), 1e-10)


def test_pinv_of_rank_deficient_matrix(rng):
    A = rng.normal(size=(6, 3)) @ rng.normal(size=(3, 7))
    _assert_penrose(A, pinv(A), 1e-10)
    assert svd_factors(A).rank == 3


def test_svd_factors_reconstruct(rng):
    J = rng.normal(size=(6, 7))
    f = svd_factors(J)
    assert_allclose(f.reconstruct(), J, atol=1e-12)
    assert np.all(np.diff(f.singular_values) <= 0.0)
    assert abs(f.sigma_min - sigma_min(J)) < 1e-12


def test_alsi_is_plain_pinv_away_from_singularity():
    J = np.diag([1.0, 0.5, 0.2, 0.1, 0.1, 0.05])
    assert alsi_damping(0.05, 0.01, 2.0) == 0.0
    assert_allclose(alsi_pinv(J, 0.01, 2.0), pinv(J))


def test_alsi_damps_near_singularity():
    J = np.diag([1.0, 1.0, 1.0, 1.0, 1.0, 0.005])
    lam2 = alsi_damping(0.005, 0.01, 2.0)
    assert abs(lam2 - 0.75 * 4.0) < 1e-12
    P = alsi_pinv(J, 0.01, 2.0)
    assert abs(P[5, 5] - 0.005 / (0.005 ** 2 + lam2)) < 1e-12
    assert abs(P[0, 0] - 1.0 / (1.0 + lam2)) < 1e-12
