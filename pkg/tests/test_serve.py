import math

import pytest
from fastapi.testclient import TestClient

from kacward.cli.config import RunConfig
from kacward.serve.app import create_app
from kacward.serve.utils import load_config_and_initialize_runs, stream_text_data

app = create_app(config_file_path='tests/config.yaml')
client = TestClient(app)


def test_load_config_and_initialize_runs():
    runs = load_config_and_initialize_runs('tests/config.yaml')

    assert list(runs) == ['critical', 'thermo-coarse', 'graphs-3', 'identity-3', 'amplitude-example', 'trace-6']
    assert all(isinstance(cfg, RunConfig) for cfg in runs.values())


def test_unnamed_runs_are_rejected(tmp_path):
    config = tmp_path / 'config.yaml'
    config.write_text('runs:\n  - command: critical\n')

    with pytest.raises(ValueError, match="needs a name"):
        load_config_and_initialize_runs(str(config))


def test_stream_text_data():
    assert list(stream_text_data('abcdefg', chunk_size=3)) == ['abc', 'def', 'g']


def test_routes_present():
    paths = {route.path for route in app.routes}

    assert {'/critical', '/thermo', '/verify', '/polynomial', '/amplitude', '/run'} <= paths


def test_app_metadata_overrides():
    custom = create_app(api_title="Ising", api_version="9.9")

    assert custom.title == "Ising"
    assert custom.version == "9.9"


def test_critical_endpoint():
    response = client.get('/critical')

    assert response.status_code == 200
    assert response.json()['K_c'] == pytest.approx(0.5 * math.asinh(1.0), abs=1e-14)


def test_thermo_endpoint_json_and_csv():
    response = client.post('/thermo', json={'kmin': 0.1, 'kmax': 0.8, 'steps': 8})
    rows = response.json()
    assert response.status_code == 200
    assert len(rows) == 8
    assert rows[0]['K'] == pytest.approx(0.1)

    response = client.post('/thermo', json={'K': 0.0, 'format': 'csv'})
    lines = response.text.strip().splitlines()
    assert response.status_code == 200
    assert lines[0].startswith('K,u,k1')
    assert float(lines[1].split(',')[3]) == pytest.approx(math.log(2.0), rel=1e-12)


def test_thermo_endpoint_rejects_conflicting_couplings():
    response = client.post('/thermo', json={'K': 0.2, 'kmin': 0.1, 'kmax': 0.3})

    assert response.status_code == 400


def test_polynomial_endpoint():
    response = client.post('/polynomial', json={'N': 3})

    assert response.status_code == 200
    assert response.json()['polynomial']['coeffs'] == [1, 0, 0, 0, 4, 0, 4, 0, 7]

    assert client.post('/polynomial', json={'N': 9}).status_code == 400


def test_amplitude_endpoint():
    response = client.post('/amplitude', json={'n': 3, 'x': 2, 'y': 1, 'direction': 'L', 'u': 0.5})
    body = response.json()

    # 2 u^3 times the conjugate phase e^{-i pi/4}
    assert response.status_code == 200
    assert body['real'] == pytest.approx(0.25 * math.cos(math.pi / 4), abs=1e-14)
    assert body['imag'] == pytest.approx(-0.25 * math.sin(math.pi / 4), abs=1e-14)


def test_verify_endpoint():
    response = client.post('/verify', json={'N': 2})
    statuses = {check['status'] for check in response.json()['checks']}

    assert response.status_code == 200
    assert 'FAIL' not in statuses
    assert 'PASS' in statuses


def test_run_endpoint():
    response = client.post('/run', json={'name': 'graphs-3'})
    body = response.json()

    assert response.status_code == 200
    assert body['command'] == 'graphs'
    assert body['result']['even_subgraphs'] == 15

    response = client.post('/run', json={'name': 'thermo-coarse'})
    assert response.headers['content-type'].startswith('text/csv')
    assert len(response.text.strip().splitlines()) == 9

    assert client.post('/run', json={'name': 'nope'}).status_code == 400
