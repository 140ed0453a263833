import pytest

from kacward.core.hightemp import density_of_states
from kacward.core.lattice import build_lattice
from kacward.utils.constants import BRUTE_MAX_N_ENV_VAR, DEFAULT_BRUTE_MAX_N
from kacward.utils.env_utils import brute_force_max_n, load_config_and_dotenv, read_env_variable
from kacward.utils.exceptions import IntractableSizeError


def test_brute_force_guard_default(monkeypatch):
    monkeypatch.delenv(BRUTE_MAX_N_ENV_VAR, raising=False)

    assert brute_force_max_n() == DEFAULT_BRUTE_MAX_N
    assert brute_force_max_n(2) == 2


def test_brute_force_guard_from_environment(monkeypatch):
    monkeypatch.setenv(BRUTE_MAX_N_ENV_VAR, '3')

    assert brute_force_max_n() == 3
    with pytest.raises(IntractableSizeError, match="intractable size"):
        density_of_states(build_lattice(4))


def test_malformed_guard(monkeypatch):
    monkeypatch.setenv(BRUTE_MAX_N_ENV_VAR, 'five')

    with pytest.raises(ValueError, match=BRUTE_MAX_N_ENV_VAR):
        brute_force_max_n()


def test_load_config_and_dotenv(tmp_path, monkeypatch):
    monkeypatch.delenv('KACWARD_TEST_VARIABLE', raising=False)
    env_file = tmp_path / '.env'
    env_file.write_text('KACWARD_TEST_VARIABLE=loaded\n')

    config = load_config_and_dotenv('tests/config.yaml', str(env_file))

    assert [run['name'] for run in config['runs']][:2] == ['critical', 'thermo-coarse']
    assert read_env_variable('KACWARD_TEST_VARIABLE') == 'loaded'


def test_load_config_errors(tmp_path):
    with pytest.raises(OSError, match="missing.yaml"):
        load_config_and_dotenv(str(tmp_path / 'missing.yaml'))

    not_a_mapping = tmp_path / 'list.yaml'
    not_a_mapping.write_text('- 1\n- 2\n')
    with pytest.raises(ValueError):
        load_config_and_dotenv(str(not_a_mapping))
