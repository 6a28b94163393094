import csv

import numpy as np
import pytest
from numpy.testing import assert_allclose

from analysis import (
    SUMMARY_FIELDS, acceptance_report, attenuation, effort_and_error, read_trace_csv,
    summary_row, trace_header, write_summary, write_trace_csv,
)
from conftest import Q_HOME
from controllers import AttenuationSpec, ControllerSpec
from kinematics import fkm
from simulator import ScenarioConfig, SimTrace, run
from trajectories import SetPoint


def _trace(N=201, dt=0.01, n=2, T=None, O=None, vw=None, vc=None, u=None):
    zeros3 = np.zeros((N, 3))
    zeros6 = np.zeros((N, 6))
    z = np.zeros((N, 8))
    z[:, 0] = 1e-3
    return SimTrace(
        scenario='synthetic', controller='hinf',
        t=np.arange(N) * dt, q=np.zeros((N, n)),
        u=np.zeros((N, n)) if u is None else u,
        x=np.tile([1.0, 0, 0, 0, 0, 0, 0, 0], (N, 1)),
        xd=np.tile([1.0, 0, 0, 0, 0, 0, 0, 0], (N, 1)),
        xi_d=zeros6.copy(), z=z,
        O=zeros3.copy() if O is None else O,
        T=zeros3.copy() if T is None else T,
        branch=['minus'] * N,
        sigma_min=np.full(N, 0.5), kappa_s=np.zeros(N), s_bar=np.zeros(N, dtype=int),
        gamma_norm=np.zeros(N), vs_norm=np.zeros(N),
        vw=zeros6.copy() if vw is None else vw,
        vc=zeros6.copy() if vc is None else vc,
        residual=zeros6.copy(), target_twist=zeros6.copy(),
    )


def _dual(N, v):
    out = np.zeros((N, 6))
    out[:, 3:] = v
    return out


def test_zero_error_gives_zero_ratio():
    trace = _trace(vw=_dual(201, [0.1, 0.0, 0.0]))
    report = attenuation(trace, None)
    assert report.gamma_T_sim == 0.0
    assert report.gamma_O_sim is None


def test_constant_error_ratio():
    N = 201
    T = np.tile([1.0, 0.0, 0.0], (N, 1))
    trace = _trace(T=T, vw=_dual(N, [2.0, 0.0, 0.0]), vc=_dual(N, [0.0, 2.0, 0.0]))
    report = attenuation(trace, AttenuationSpec.uniform(2.0, 0.2))
    assert abs(report.gamma_T_sim - 0.125) < 1e-12
    assert report.gamma_T_ok is True
    assert report.gamma_O_ok is None

    strict = attenuation(trace, AttenuationSpec.uniform(2.0, 0.1))
    assert strict.gamma_T_ok is False
    assert strict.passed is False

    rooted = attenuation(trace, None, sqrt_ratio=True)
    assert abs(rooted.gamma_T_sim - np.sqrt(0.125)) < 1e-12


def test_ratio_is_scale_free():
    rng = np.random.default_rng(3)
    N = 101
    T = rng.normal(size=(N, 3))
    vw = rng.normal(size=(N, 6))
    a = attenuation(_trace(N=N, T=T, vw=vw), None)
    b = attenuation(_trace(N=N, T=3.0 * T, vw=3.0 * vw), None)
    assert abs(a.gamma_T_sim - b.gamma_T_sim) < 1e-12


def test_residual_counts_as_disturbance():
    N = 201
    trace = _trace(T=np.tile([1.0, 0.0, 0.0], (N, 1)))
    assert attenuation(trace, None).gamma_T_sim is None
    trace.residual = _dual(N, [2.0, 0.0, 0.0])
    assert abs(attenuation(trace, None).gamma_T_sim - 0.25) < 1e-12


def test_round_off_residual_is_not_a_disturbance(lbr4):
    spec = AttenuationSpec.uniform(2.0, 2.0)
    config = ScenarioConfig(name='clean', chain=lbr4, q0=Q_HOME,
                            controller=ControllerSpec(kind='hinf', attenuation=spec),
                            trajectory=SetPoint(fkm(lbr4, Q_HOME + 0.2)), T=2.0)
    trace = run(config)
    # J J+ = I away from singularities, the residual is round-off only
    assert np.max(np.abs(trace.residual)) < 1e-10
    report = attenuation(trace, spec)
    assert report.gamma_T_sim is None
    assert report.gamma_O_sim is None
    assert report.flags == {}
    assert report.passed


def test_tiny_genuine_disturbance_still_counts():
    N = 201
    trace = _trace(T=np.tile([1e-6, 0.0, 0.0], (N, 1)), vw=_dual(N, [1e-6, 0.0, 0.0]))
    assert attenuation(trace, None).gamma_T_sim == pytest.approx(1.0)


def test_effort_integral():
    N = 201
    u = np.tile([3.0, 4.0], (N, 1))
    summary = effort_and_error(_trace(u=u))
    assert abs(summary.effort_integral - 10.0) < 1e-12
    assert_allclose(summary.u_norm, 5.0)
    assert summary.min_sigma == 0.5


def test_trace_header():
    header = trace_header(2)
    assert header[:5] == ['t', 'q0', 'q1', 'u0', 'u1']
    assert header[-1] == 'vc5'
    assert len(header) == 1 + 2 + 2 + 8 + 8 + 4 + 6 + 6


@pytest.fixture
def short_run(lbr4):
    config = ScenarioConfig(
        name='short', chain=lbr4, q0=Q_HOME,
        controller=ControllerSpec(kind='hinf', attenuation=AttenuationSpec.uniform(2.0, 0.4)),
        trajectory=SetPoint(fkm(lbr4, Q_HOME + 0.1)), T=0.2, converge_tol=10.0,
    )
    return config, run(config)


def test_csv_round_trip_is_exact(short_run, tmp_path):
    _, trace = short_run
    path = tmp_path / 'short.csv'
    write_trace_csv(trace, str(path))
    back = read_trace_csv(str(path))
    assert np.array_equal(back.t, trace.t)
    assert np.array_equal(back.q, trace.q)
    assert np.array_equal(back.x, trace.x)
    assert np.array_equal(back.err_norm, trace.err_norm)
    assert np.array_equal(back.vw, trace.vw_effective)
    assert np.array_equal(back.vc, trace.vc_effective)


def test_csv_bytes_are_reproducible(short_run, tmp_path):
    config, trace = short_run
    write_trace_csv(trace, str(tmp_path / 'a.csv'))
    write_trace_csv(run(config), str(tmp_path / 'b.csv'))
    assert (tmp_path / 'a.csv').read_bytes() == (tmp_path / 'b.csv').read_bytes()


def test_read_rejects_foreign_header(tmp_path):
    path = tmp_path / 'bad.csv'
    path.write_text('a,b\n1,2\n')
    with pytest.raises(ValueError):
        read_trace_csv(str(path))


def test_summary_row_and_file(short_run, tmp_path):
    config, trace = short_run
    report = acceptance_report(trace, config)
    assert report.converged is True
    assert report.sigma_bound_ok is None
    row = summary_row(trace, report, 'short.csv')
    assert set(row) == set(SUMMARY_FIELDS)
    assert row['steps'] == 41

    path = tmp_path / 'summary.csv'
    write_summary([row], str(path))
    with open(path, newline='') as f:
        rows = list(csv.DictReader(f))
    assert rows[0]['scenario'] == 'short'
    assert rows[0]['sigma_bound_ok'] == ''
    assert rows[0]['converged'] == 'True'
