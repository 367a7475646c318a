"""Zig-Zag and bouncy particle samplers on anisotropic Gaussian targets."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import run_experiment as _run_experiment


def run(subcommand, **overrides):
    """Run a CLI subcommand with config overrides given as keyword arguments."""
    return _run_experiment(subcommand, _json.dumps(overrides))
