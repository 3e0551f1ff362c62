"""Python bindings for the geoaccel library."""

import json

from ._core import ConfigError, Error, certify, default_params, equivalence, run
from ._core import _command, _geodesic

__all__ = [
    "ConfigError",
    "Error",
    "certify",
    "default_params",
    "dual_geodesic",
    "equivalence",
    "run",
    "run_command",
]


def dual_geodesic(generator, x, y, samples=101):
    """Dual-flat geodesic between x and y for a generator spec dict.

    Returns (t, points, ode_residual).
    """
    return _geodesic(json.dumps(generator), x, y, samples)


def run_command(name, config, out="", format="csv", seed=None):
    """Runs a CLI subcommand in-process. Returns (exit_code, stdout, log)."""
    return _command(name, json.dumps(config), out, format, seed)
