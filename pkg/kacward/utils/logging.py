# kacward/utils/logging.py

import logging

# Configure the logger
logger = logging.getLogger('kacward')
logger.setLevel(logging.INFO)

# Create a console handler with a specific format
ch = logging.StreamHandler()
ch.setLevel(logging.DEBUG)
formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
ch.setFormatter(formatter)

# Add the handler to the logger
logger.addHandler(ch)

# Keep library output off the root logger
logger.propagate = False


def set_verbosity(verbose: bool = False, quiet: bool = False) -> None:
    """Switch the package logger between DEBUG, INFO and WARNING."""
    if verbose and quiet:
        raise ValueError("verbose and quiet are mutually exclusive")
    if verbose:
        logger.setLevel(logging.DEBUG)
    elif quiet:
        logger.setLevel(logging.WARNING)
    else:
        logger.setLevel(logging.INFO)
