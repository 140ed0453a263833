from typing import Dict

from kacward.cli.config import RunConfig, load_run_configs
from kacward.utils.logging import logger

STREAMING_CHUNK_SIZE = 1024


def load_config_and_initialize_runs(config_file_path: str, env_file_path: str = None) -> Dict[str, RunConfig]:
    """
    Load the YAML configuration file and optionally load environment variables from a .env file. Validate
    one RunConfig per entry of the `runs:` list.

    Parameters:
        config_file_path (str): Path to the YAML configuration file.
        env_file_path (str): Path to the .env file.

    Returns:
        dict: The configuration mapping (run name -> RunConfig)
    """
    runs = {}
    for cfg in load_run_configs(config_file_path, env_file_path):
        if cfg.name is None:
            raise ValueError(f"Every run served from {config_file_path} needs a name")
        if cfg.name in runs:
            raise ValueError(f"Duplicate run name {cfg.name!r} in {config_file_path}")
        runs[cfg.name] = cfg

    logger.info(f"loaded {len(runs)} runs from {config_file_path}")
    return runs


def stream_text_data(text_data: str, chunk_size: int = STREAMING_CHUNK_SIZE):
    start = 0
    end = chunk_size
    while start < len(text_data):
        yield text_data[start:end]
        start = end
        end += chunk_size
