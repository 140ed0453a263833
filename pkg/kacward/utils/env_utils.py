import os
from typing import Optional

import yaml
from dotenv import load_dotenv

from kacward.utils.constants import BRUTE_MAX_N_ENV_VAR, DEFAULT_BRUTE_MAX_N


def read_env_variable(variable_name: str, default_value: str = None) -> str:
    """Reads an environment variable, returning a default value if not found."""
    return os.getenv(variable_name, default_value)


def read_int_env_variable(variable_name: str, default_value: int) -> int:
    """Reads an integer environment variable, raising ValueError on malformed values."""
    raw = read_env_variable(variable_name)
    if raw is None or raw.strip() == '':
        return default_value
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f'Environment variable {variable_name} must be an integer, got {raw!r}')


def brute_force_max_n(override: Optional[int] = None) -> int:
    """
    Resolve the brute-force size guard.

    Parameters:
        override (int): Explicit limit; takes precedence over the environment.

    Returns:
        int: The largest N for which 2^(N^2) enumeration is allowed.
    """
    if override is not None:
        return override
    return read_int_env_variable(BRUTE_MAX_N_ENV_VAR, DEFAULT_BRUTE_MAX_N)


def load_config_and_dotenv(config_file_path: str, env_file_path: str = None) -> dict:
    """
    Load the YAML configuration file and optionally load environment variables from a .env file.

    Parameters:
        config_file_path (str): Path to the YAML configuration file.
        env_file_path (str): Path to the .env file.

    Returns:
        dict: The configuration dictionary.
    """
    # Optionally load environment variables from a .env file
    if env_file_path:
        load_dotenv(dotenv_path=env_file_path)

    # Load the YAML configuration file
    try:
        with open(config_file_path) as f:
            config = yaml.safe_load(f)
    except OSError as e:
        raise OSError(f'Could not read config file {config_file_path}: {e}') from e

    if config is None:
        config = {}
    if not isinstance(config, dict):
        raise ValueError(f'Config file {config_file_path} must contain a mapping at the top level')

    return config
