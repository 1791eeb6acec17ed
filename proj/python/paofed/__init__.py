"""Python front end for the paofed simulator core."""

import json

from . import _core
from ._core import (
    CSV_HEADER,
    DEFAULT_MU,
    ConfigError,
    MaskScheduler,
    ParameterError,
    RffMap,
    SharingMode,
    mse_db_from_errors,
    sample_delays,
)

__all__ = [
    "CSV_HEADER",
    "DEFAULT_MU",
    "ConfigError",
    "MaskScheduler",
    "ParameterError",
    "RffMap",
    "SharingMode",
    "mse_db_from_errors",
    "sample_delays",
    "preset",
    "resolve",
    "simulate",
    "run_to_dir",
    "mu_bound",
]


def _dump(config):
    return config if isinstance(config, str) else json.dumps(config)


def preset(name):
    """Resolved config dict for "setting1" or "setting2" with the default variants."""
    return json.loads(_core.preset_config(name))


def resolve(config):
    return json.loads(_core.resolve_config(_dump(config)))


def simulate(config, seeds=None, threads=0):
    """Runs every variant; returns {name: {column: list}} of seed-averaged curves."""
    return _core.simulate(_dump(config), None if seeds is None else str(seeds), threads)


def run_to_dir(config, out_dir, title="run", seeds=None):
    """Same output as `paofed run`: CSVs, manifest.json and figure.json."""
    return _core.run_to_dir(_dump(config), str(out_dir), title, None if seeds is None else str(seeds))


def mu_bound(config, samples_per_client=500):
    """(bound, verdict lines) for the step sizes in config."""
    return _core.mu_bound(_dump(config), samples_per_client)
