"""
Closed-loop experiments on the 7-DOF arm, run from the shipped scenario
files: least effort against the baseline controllers, the attenuation grid,
the moving target and the reach into the singular region.
"""
import math
import os

import numpy as np
import pytest

from analysis import SIGMA_BOUND_SLACK, acceptance_report, attenuation, effort_and_error
from conftest import LBR4_PATH, Q_HOME, SCENARIOS_DIR
from controllers import BASELINE_KINDS, AttenuationSpec, ControllerSpec
from disturbances import KIND_BAND_LIMITED, DisturbanceSignal
from kinematics import fkm, load_chain
from scenario_config import load_scenarios
from simulator import DisturbancePair, ScenarioConfig, run
from trajectories import SetPoint

SETPOINT_KINDS = ('hinf', 'dq_r8', 'dq_robust', 'htm', 'decoupled')


def _shipped(name):
    return load_scenarios(os.path.join(SCENARIOS_DIR, f'{name}.cfg'))


@pytest.fixture(scope='module')
def setpoint_runs():
    return {s.controller.kind: (s, run(s)) for s in _shipped('setpoint')}


def test_setpoint_runs_every_controller(setpoint_runs):
    assert sorted(setpoint_runs) == sorted(SETPOINT_KINDS)


def test_setpoint_target_is_a_turn_about_the_base(setpoint_runs):
    _, trace = setpoint_runs['hinf']
    # the relative pose is a pure rotation about an axis through the world origin
    assert np.linalg.norm(trace.T[0]) < 1e-6
    assert np.linalg.norm(trace.O[0]) > 0.5


@pytest.mark.parametrize('kind', SETPOINT_KINDS)
def test_every_controller_converges(setpoint_runs, kind):
    config, trace = setpoint_runs[kind]
    assert trace.t[-1] == pytest.approx(10.0)
    assert trace.err_norm[-1] < 1e-3
    assert acceptance_report(trace, config).converged is True


@pytest.mark.parametrize('kind', [k for k in SETPOINT_KINDS if k != 'hinf'])
def test_hinf_uses_least_effort(setpoint_runs, kind):
    hinf = effort_and_error(setpoint_runs['hinf'][1]).effort_integral
    other = effort_and_error(setpoint_runs[kind][1]).effort_integral
    assert hinf < other


def test_hinf_effort_is_the_quarter_turn(setpoint_runs):
    # one joint carries the whole turn
    effort = effort_and_error(setpoint_runs['hinf'][1]).effort_integral
    assert effort <= 1.01 * 0.5 * math.pi


GRID = (3.5, 2.0, 0.9, 0.6, 0.5, 0.4, 0.2)


@pytest.fixture(scope='module')
def grid_reports():
    chain = load_chain(LBR4_PATH)
    T = 6.0
    amplitude = (0.05, 0.05, 0.05, 0.02, 0.02, 0.02)
    signals = DisturbancePair(
        v_w=DisturbanceSignal(kind=KIND_BAND_LIMITED, amplitude=amplitude, seed=7, horizon=T),
        v_c=DisturbanceSignal(kind=KIND_BAND_LIMITED, amplitude=amplitude, seed=8, horizon=T),
    )
    reports = []
    for gamma_t in GRID:
        spec = AttenuationSpec.uniform(2.0, gamma_t)
        config = ScenarioConfig(name=f'grid_{gamma_t:g}', chain=chain, q0=Q_HOME,
                                controller=ControllerSpec(kind='hinf', attenuation=spec),
                                trajectory=SetPoint(fkm(chain, Q_HOME)), disturbances=signals, T=T)
        reports.append(attenuation(run(config), spec))
    return reports


def test_grid_meets_every_level(grid_reports):
    for gamma_t, report in zip(GRID, grid_reports):
        assert report.gamma_T_ok is True, gamma_t
        assert report.gamma_O_ok is True, gamma_t
        assert report.passed


def test_grid_ratio_follows_the_level(grid_reports):
    ratios = [r.gamma_T_sim for r in grid_reports]
    assert all(r > 0.0 for r in ratios)
    assert np.all(np.diff(ratios) < 0.0)


@pytest.fixture(scope='module')
def moving_runs():
    return {s.controller.kind: (s, run(s)) for s in _shipped('moving_target')}


def test_moving_target_baselines_use_their_own_gain(moving_runs):
    for kind, (config, _) in moving_runs.items():
        if kind in BASELINE_KINDS:
            assert config.controller.gain == 3.5
        else:
            assert config.controller.attenuation.gamma_T == pytest.approx(0.4)


def test_moving_target_hinf_meets_its_levels(moving_runs):
    config, trace = moving_runs['hinf']
    report = acceptance_report(trace, config)
    assert report.gamma_T_ok is True
    assert report.gamma_O_ok is True


@pytest.mark.parametrize('kind', ['dq_r8', 'dq_robust', 'htm'])
def test_moving_target_efforts_are_matched(moving_runs, kind):
    hinf = effort_and_error(moving_runs['hinf'][1]).effort_integral
    other = effort_and_error(moving_runs[kind][1]).effort_integral
    assert abs(other - hinf) <= 0.1 * hinf


@pytest.fixture(scope='module')
def reach_run():
    config = _shipped('singularity')[0]
    return config, run(config)


def test_reach_enters_the_singular_region(reach_run):
    config, trace = reach_run
    assert np.max(trace.kappa_s) > 0.0
    assert np.min(trace.sigma_min) < config.controller.singular_region.sigma_region


def test_sigma_stays_above_the_lower_bound(reach_run):
    config, trace = reach_run
    bound = config.controller.singular_region.sigma_lower_bound
    assert np.min(trace.sigma_min) >= bound - SIGMA_BOUND_SLACK
    assert acceptance_report(trace, config).sigma_bound_ok is True


def test_projection_stays_within_its_bound(reach_run):
    _, trace = reach_run
    bound = trace.kappa_s * np.sqrt(trace.s_bar) * trace.gamma_norm
    assert np.all(trace.vs_norm <= bound + 1e-9)


def test_arm_comes_back(reach_run):
    _, trace = reach_run
    assert trace.err_norm[-1] < 1e-2


@pytest.mark.parametrize('name, kind', [('singularity_alsi', 'hinf'), ('singularity_alsi_htm', 'htm')])
def test_damped_inverse_crosses_the_reach(name, kind):
    config = _shipped(name)[0]
    assert config.controller.kind == kind
    assert config.controller.pinv == 'alsi'
    trace = run(config)
    assert np.all(np.isfinite(trace.u))
    assert np.max(trace.u_norm) < 100.0
    assert trace.err_norm[-1] < 5e-2
