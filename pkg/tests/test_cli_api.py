import csv
import dataclasses
import os

import pytest

from api_server import APIServer
from batch_runner import BatchRunner
from conftest import PLANAR_PATH
from controllers import CONTROLLER_KINDS
from main import EXIT_CONFIG, EXIT_FAILED, EXIT_OK, main
from scenario_config import build_scenarios, loads

CONFIG = f"""
[robot]
chain = {PLANAR_PATH}
q0 = 0.3 0.6

[controller]
kind = hinf, htm
gain = 2

[trajectory]
kind = setpoint
target_position = 1.2 0.8 0
target_angle = 1.0
target_axis = 0 0 1

[sim]
name = planar
T = 0.3
"""


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / 'planar.cfg'
    path.write_text(CONFIG)
    return path


def test_list_controllers(capsys):
    assert main(['--list-controllers']) == EXIT_OK
    out = capsys.readouterr().out.split()
    assert out == list(CONTROLLER_KINDS)


def test_run_writes_traces_and_summary(config_file, tmp_path):
    out = tmp_path / 'results'
    assert main(['run', '--config', str(config_file), '--out', str(out)]) == EXIT_OK
    assert os.path.isfile(out / 'planar_hinf.csv')
    assert os.path.isfile(out / 'planar_htm.csv')
    with open(out / 'summary.csv', newline='') as f:
        rows = list(csv.DictReader(f))
    assert [r['scenario'] for r in rows] == ['planar_hinf', 'planar_htm']
    assert all(r['steps'] == '61' for r in rows)


def test_run_rejects_bad_config(tmp_path):
    path = tmp_path / 'bad.cfg'
    path.write_text(CONFIG.replace('kind = setpoint', 'kind = spiral'))
    assert main(['run', '--config', str(path), '--out', str(tmp_path / 'r')]) == EXIT_CONFIG
    assert main(['run', '--config', str(tmp_path / 'none.cfg'), '--out', str(tmp_path / 'r')]) == EXIT_CONFIG


def test_run_reports_unmet_tolerance(tmp_path):
    path = tmp_path / 'strict.cfg'
    path.write_text(CONFIG + 'converge_tol = 1e-9\n')
    assert main(['run', '--config', str(path), '--out', str(tmp_path / 'r')]) == EXIT_FAILED


def test_no_command_prints_help(capsys):
    assert main([]) == EXIT_CONFIG
    assert 'dqhinf' in capsys.readouterr().out


@pytest.fixture
def client(tmp_path):
    server = APIServer(port=0)
    server.set_batch_runner(BatchRunner(results_dir=str(tmp_path), workers=2))
    return server.app.test_client()


def test_health_without_runner():
    response = APIServer().app.test_client().get('/health')
    assert response.status_code == 200
    assert response.get_json()['status'] == 'degraded'


def test_run_without_runner():
    response = APIServer().app.test_client().post('/run', data=CONFIG)
    assert response.status_code == 503


def test_health_and_info(client):
    health = client.get('/health').get_json()
    assert health['status'] == 'healthy'
    assert health['runs_completed'] == 0
    info = client.get('/info').get_json()
    assert info['name'] == 'dqhinf'
    assert '/run' in info['endpoints']


def test_controllers_endpoint(client):
    assert client.get('/controllers').get_json()['controllers'] == list(CONTROLLER_KINDS)


def test_run_text_body(client):
    response = client.post('/run', data=CONFIG, content_type='text/plain')
    assert response.status_code == 200
    body = response.get_json()
    assert body['success'] is True
    assert [r['row']['scenario'] for r in body['results']] == ['planar_hinf', 'planar_htm']
    assert client.get('/health').get_json()['runs_completed'] == 2


def test_run_json_body(client):
    response = client.post('/run', json={'config': CONFIG, 'seed': 3})
    assert response.status_code == 200
    assert response.get_json()['passed'] is True


@pytest.mark.parametrize('kwargs', [
    {'json': {'config': CONFIG, 'seed': 'three'}},
    {'json': {}},
    {'data': '[robot]\nchain = x\n', 'content_type': 'text/plain'},
    {'data': CONFIG.replace('kind = hinf, htm', 'kind = pid'), 'content_type': 'text/plain'},
])
def test_run_rejects_bad_requests(client, kwargs):
    response = client.post('/run', **kwargs)
    assert response.status_code == 400
    assert 'error' in response.get_json()


def test_metrics_endpoint(client):
    client.post('/run', data=CONFIG, content_type='text/plain')
    response = client.get('/metrics')
    assert response.status_code == 200
    text = response.get_data(as_text=True)
    assert 'dqhinf_simulation_runs_total' in text
    assert 'dqhinf_http_requests_total' in text


def test_run_rejects_chain_outside_the_repository(client, tmp_path):
    secret = tmp_path / 'secret.dh'
    secret.write_text('dh-standard\n0 0 1 token-1234\n')
    for chain in ('/etc/passwd', str(secret)):
        response = client.post('/run', data=CONFIG.replace(PLANAR_PATH, chain), content_type='text/plain')
        assert response.status_code == 400
        error = response.get_json()['error']
        assert 'outside' in error
        assert 'root:' not in error
        assert 'token-1234' not in error


def test_run_rejects_escaping_name(client, tmp_path):
    response = client.post('/run', data=CONFIG.replace('name = planar', 'name = ../escape'),
                           content_type='text/plain')
    assert response.status_code == 400
    assert not os.path.exists(tmp_path.parent / 'escape_hinf.csv')


def test_runner_keeps_traces_inside_the_results_directory(tmp_path):
    escaping = dataclasses.replace(build_scenarios(loads(CONFIG))[0], name='../escape')
    result = BatchRunner(results_dir=str(tmp_path / 'r'), workers=1).run_scenario(escaping)
    assert result['success'] is False
    assert not os.path.exists(tmp_path / 'escape.csv')
