"""Configuration loading for pyfrechetann."""

import logging
import os
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, TypeVar

import yaml

from .types import ExperimentConfig

logger = logging.getLogger(__name__)

THREADS_ENV_VAR = "FRECHET_ANN_THREADS"

T = TypeVar("T")
R = TypeVar("R")


def load_experiment_config(config_path: str | Path) -> ExperimentConfig:
    """
    Load a benchmark configuration from a YAML file.

    Args:
        config_path: Path to YAML configuration file

    Returns:
        ExperimentConfig object

    Raises:
        FileNotFoundError: If config file doesn't exist
        ValueError: If config is invalid
    """
    config_path = Path(config_path)

    if not config_path.exists():
        raise FileNotFoundError(f"Configuration file not found: {config_path}")

    with open(config_path) as f:
        data = yaml.safe_load(f)

    if not isinstance(data, dict):
        raise ValueError("Configuration must be a YAML object")

    # ${VAR} values are resolved before validation so numbers can come from the environment
    data = _substitute_env_vars(data)
    return ExperimentConfig(**data)


def _substitute_env_vars(data: Any) -> Any:
    """
    Recursively substitute environment variables in configuration data.

    Supports ${VAR_NAME} syntax.
    """
    if isinstance(data, dict):
        return {key: _substitute_env_vars(value) for key, value in data.items()}
    if isinstance(data, list):
        return [_substitute_env_vars(item) for item in data]
    if isinstance(data, str):
        if data.startswith("${") and data.endswith("}"):
            var_name = data[2:-1]
            return os.getenv(var_name, data)  # Return original if env var not found
        return data
    return data


def save_config_template(output_path: str | Path) -> None:
    """
    Save a template benchmark configuration file.

    Args:
        output_path: Where to save the template
    """
    template = {
        "seed": 0,
        "sizes": [100, 400, 1600],  # dataset sizes n
        "k": 4,  # curve complexity
        "d": 2,  # ambient dimension
        "eps": [0.25, 0.5, 1.0],  # approximation factors, each in (0, 1]
        "mode": "multiplicative",  # or "additive"
        "eps_add": 0.1,  # additive slack, additive mode only
        "tolerance": 1e-7,  # Frechet bisection tolerance
        "queries": 50,
        "verify": True,  # compare every answer against brute force
        "generator": {
            "name": "random_walk",  # random_walk, uniform_points, lower_bound
            "params": {"step": 1.0},
        },
    }

    output_path = Path(output_path)
    with open(output_path, "w") as f:
        yaml.dump(template, f, default_flow_style=False, indent=2, sort_keys=False)

    logger.info("Configuration template saved to %s", output_path)


def thread_limit() -> int:
    """Worker cap for independent distance evaluations, from FRECHET_ANN_THREADS."""
    raw = os.getenv(THREADS_ENV_VAR, "1")
    try:
        value = int(raw)
    except ValueError:
        logger.warning("Ignoring %s=%r: not an integer", THREADS_ENV_VAR, raw)
        return 1
    return max(1, value)


def parallel_map(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Map fn over items in order, on up to thread_limit() worker threads."""
    workers = thread_limit()
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
